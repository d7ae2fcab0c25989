#ifndef ELCA_MODEL_HPP
#define ELCA_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "elca/hypergraph.hpp"
#include "elca/types.hpp"

namespace elca {

/// Parameters of the extended latent class model. A hyperedge carries a
/// cluster g ~ pi and an independent additional cluster k ~ tau; vertex i
/// joins it with probability a_k * phi(i, g). The last scale factor is pinned
/// to one for identifiability, so K = 1 is plain latent class analysis.
struct ElcaParams {
  Vector pi;   // G
  Vector tau;  // K
  Vector a;    // K, a(K-1) == 1
  Matrix phi;  // N x G
  std::vector<std::string> vertex_labels;  // optional, N entries when set

  Index n_vertices() const { return phi.rows(); }
  Index n_clusters() const { return pi.size(); }
  Index n_extra() const { return tau.size(); }

  friend bool operator==(const ElcaParams&, const ElcaParams&) = default;
};

/// Plain latent class parameters: vertex i joins a class-g hyperedge with
/// probability p(i, g).
struct LcaParams {
  Vector pi;  // G
  Matrix p;   // N x G

  Index n_vertices() const { return p.rows(); }
  Index n_clusters() const { return pi.size(); }
};

/// Sampled hypergraph with its generating labels (0-based).
struct LabeledSample {
  IncidenceMatrix matrix;
  std::vector<Index> z1;
  std::vector<Index> z2;
};

struct Violation {
  std::string what;
  std::vector<Index> where;  // 1-based indices, empty for whole-vector checks
};

/// Every broken invariant of `p`; empty when valid.
std::vector<Violation> validate(const ElcaParams& p);
std::vector<Violation> validate(const LcaParams& p);

/// Throws ValidationError listing the violations, if any.
void require_valid(const ElcaParams& p);

/// Flat-Dirichlet mixing weights, phi ~ U[0.05, 0.95], a_k ~ U[0.1, 0.9] for
/// k < K and a_K = 1. Deterministic per seed.
ElcaParams random_init(Index n, Index g, Index k, std::uint64_t seed);

/// Relabelling that puts `p` in canonical order.
struct CanonicalOrder {
  std::vector<Index> clusters;  // new position -> old cluster
  std::vector<Index> extra;     // new position -> old additional cluster
};

/// Clusters by non-increasing pi (ties: phi columns lexicographically
/// larger first); additional clusters by non-decreasing a with the pinned
/// a_K = 1 kept last.
CanonicalOrder canonical_order(const ElcaParams& p);
ElcaParams reorder(const ElcaParams& p, const CanonicalOrder& order);
ElcaParams canonicalize(const ElcaParams& p);

/// LCA parameters with the same marginal inclusion probabilities:
/// p(i, g) = phi(i, g) * sum_k a_k tau_k.
LcaParams implied_lca(const ElcaParams& p);

/// The K = 1 embedding of an LCA model.
ElcaParams as_elca(const LcaParams& p);

/// Draws m hyperedges independently from the generative model.
LabeledSample sample(const ElcaParams& p, Index m, std::uint64_t seed);

}  // namespace elca

#endif  // ELCA_MODEL_HPP
