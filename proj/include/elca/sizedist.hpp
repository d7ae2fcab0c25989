#ifndef ELCA_SIZEDIST_HPP
#define ELCA_SIZEDIST_HPP

#include <iosfwd>
#include <optional>

#include "elca/hypergraph.hpp"
#include "elca/model.hpp"
#include "elca/types.hpp"

namespace elca {

/// Probability mass function on {0, ..., size()-1}. For truncated infinite
/// supports `tail` bounds the mass beyond the last entry.
struct Pmf {
  Vector prob;
  double tail = 0.0;

  Index size() const { return prob.size(); }
  double operator[](Index y) const { return y < prob.size() ? prob[y] : 0.0; }
  double mean() const;
  double variance() const;
};

/// Half the L1 distance; the shorter pmf is padded with zeros.
double total_variation(const Pmf& lhs, const Pmf& rhs);

/// Distribution of a sum of independent Bernoulli(probs[i]), by O(N^2)
/// iterative convolution.
Pmf poisson_binomial_pmf(const Eigen::Ref<const Vector>& probs);

/// Hyperedge-size distribution: pi-mixture of Poisson-binomials with
/// component probabilities p(., g).
Pmf size_pmf_lca(const LcaParams& p);
/// pi x tau mixture with component probabilities a_k phi(., g).
Pmf size_pmf_elca(const ElcaParams& p);

/// Empirical size distribution on {0..N}.
Pmf empirical_size_pmf(const IncidenceMatrix& m);

struct MomentReport {
  double mean_lca = 0.0;
  double var_lca = 0.0;
  double mean_elca = 0.0;
  double var_elca = 0.0;
  double var_gap = 0.0;  // var_elca - var_lca
};

/// Closed-form size moments of an LCA model and an ELCA model linked by
/// p(i, g) = phi(i, g) * sum_k a_k tau_k (and equal pi). Throws
/// ConditionError when the link fails beyond 1e-10, ValidationError on
/// dimension mismatch.
MomentReport moments(const LcaParams& lca, const ElcaParams& elca);

/// Poisson mixture sum_c weights[c] Pois(rates[c]), truncated at
/// `truncation` terms or, when absent, at the smallest T whose Chernoff
/// tail bound on the largest rate is below 1e-12.
Pmf poisson_mixture(const Eigen::Ref<const Vector>& weights, const Eigen::Ref<const Vector>& rates,
                    std::optional<Index> truncation = std::nullopt);

/// G-component limit sum_g pi_g Pois(lambda_g).
Pmf poisson_mixture_limit_lca(const Eigen::Ref<const Vector>& pi, const Eigen::Ref<const Vector>& lambdas,
                              std::optional<Index> truncation = std::nullopt);
/// G*K-component limit sum_{g,k} pi_g tau_k Pois(lambdas(g, k)).
Pmf poisson_mixture_limit_elca(const Eigen::Ref<const Vector>& pi, const Eigen::Ref<const Vector>& tau,
                               const Eigen::Ref<const Matrix>& lambdas,
                               std::optional<Index> truncation = std::nullopt);

/// Two-column CSV "size,probability".
void write_pmf_csv(std::ostream& out, const Pmf& pmf);

}  // namespace elca

#endif  // ELCA_SIZEDIST_HPP
