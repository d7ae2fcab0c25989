#ifndef ELCA_EM_HPP
#define ELCA_EM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "elca/hypergraph.hpp"
#include "elca/model.hpp"
#include "elca/numeric.hpp"
#include "elca/types.hpp"

namespace elca {

/// Posterior weights zeta(j, g, k) = P(cluster g, additional cluster k | edge j).
/// Stored as an M x (G*K) matrix; column k*G + g.
class Responsibilities {
 public:
  Responsibilities() = default;
  Responsibilities(Index n_edges, Index n_clusters, Index n_extra)
      : joint_(Matrix::Zero(n_edges, n_clusters * n_extra)), n_clusters_(n_clusters), n_extra_(n_extra) {}
  Responsibilities(Matrix joint, Index n_clusters, Index n_extra)
      : joint_(std::move(joint)), n_clusters_(n_clusters), n_extra_(n_extra) {}

  Index n_edges() const { return joint_.rows(); }
  Index n_clusters() const { return n_clusters_; }
  Index n_extra() const { return n_extra_; }

  static Index column(Index g, Index k, Index n_clusters) { return k * n_clusters + g; }
  Index column(Index g, Index k) const { return column(g, k, n_clusters_); }

  double operator()(Index j, Index g, Index k) const { return joint_(j, column(g, k)); }
  double& operator()(Index j, Index g, Index k) { return joint_(j, column(g, k)); }

  const Matrix& joint() const { return joint_; }

  /// M x G: sum over k.
  Matrix cluster_marginals() const;
  /// M x K: sum over g.
  Matrix extra_marginals() const;

 private:
  Matrix joint_;
  Index n_clusters_ = 0;
  Index n_extra_ = 0;
};

// ---------------------------------------------------------------------------
// Likelihoods

/// Observed-data log-likelihood, evaluated in log space. Returns -inf when a
/// cell is impossible under `p` (probability exactly 0 or 1 against the data).
double loglik(const IncidenceMatrix& m, const ElcaParams& p);
double loglik(const IncidenceMatrix& m, const LcaParams& p);

/// Per-hyperedge log-likelihood contributions.
Vector edge_logliks(const IncidenceMatrix& m, const ElcaParams& p);

/// Complete-data log-likelihood for 0-based hard labels.
double complete_loglik(const IncidenceMatrix& m, const ElcaParams& p, std::span<const Index> z1,
                       std::span<const Index> z2);

/// Bayes rule per hyperedge, normalized in log space.
Responsibilities e_step(const IncidenceMatrix& m, const ElcaParams& p);

// ---------------------------------------------------------------------------
// Conditional maximization for one phi(i, g)

/// Exact conditional objective of phi(i, g), up to terms free of phi:
///   sum_k ones[k] log(phi) + zeros[k] log(1 - a_k phi)
/// with ones[k] = sum_j zeta(j,g,k) x_ij and zeros[k] = sum_j zeta(j,g,k) (1 - x_ij).
struct PhiObjective {
  Vector ones;
  Vector zeros;
  Vector a;

  double operator()(double phi) const;
};

/// Quadratic minorizer of PhiObjective around `anchor`, with the log(1 - a_k phi)
/// terms of k < K replaced by their second-order bound using curvature
/// -a_k^2 / (1 - a_k)^2:
///   A1 log(phi) + A2 log(1 - phi) + B1 (phi - anchor) + B2 (phi - anchor)^2 + offset.
/// `offset` makes it touch the exact objective at the anchor.
struct PhiMinorizer {
  double A1 = 0.0;
  double A2 = 0.0;
  double B1 = 0.0;
  double B2 = 0.0;
  double anchor = 0.5;
  double offset = 0.0;

  static PhiMinorizer at(const PhiObjective& objective, double anchor);

  double operator()(double phi) const;
  /// d/dphi; strictly decreasing on (0, 1).
  double derivative(double phi) const;

  /// Monic stationary-point cubic phi^3 + b phi^2 + c phi + d (needs B2 < 0).
  struct Cubic {
    double b, c, d;
    double operator()(double x) const { return numeric::eval_monic_cubic(b, c, d, x); }
  };
  Cubic cubic() const;

  struct Argmax {
    double value;      // maximizer on [lo, hi]
    bool interior;     // a stationary point, not a clamp
  };
  /// Feasible stationary point maximizing the minorizer, or the better clamp.
  Argmax maximize(double lo = kProbFloor, double hi = 1.0 - kProbFloor) const;
};

// ---------------------------------------------------------------------------
// Conditional maximization for one a_k (k < K)

/// Exact conditional objective of a_k, up to terms free of a_k:
///   ones log(a) + sum_{i,g} zeros(i,g) log(1 - a phi(i,g))
/// with ones = sum_j sum_g zeta(j,g,k) |e_j| and zeros(i,g) = sum_j zeta(j,g,k) (1 - x_ij).
struct AObjective {
  double ones = 0.0;
  Matrix zeros;  // N x G
  Matrix phi;    // N x G

  double operator()(double a) const;
};

/// Minorizer A log(a) + B (a - anchor) + C (a - anchor)^2 + offset, built
/// with curvature bound -phi^2 / (1 - phi)^2.
struct AMinorizer {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double anchor = 0.5;
  double offset = 0.0;

  static AMinorizer at(const AObjective& objective, double anchor);

  double operator()(double a) const;
  /// Closed-form positive root of the stationary quadratic, clamped to [lo, hi].
  double maximize(double lo = kProbFloor, double hi = 1.0 - kProbFloor) const;
};

// ---------------------------------------------------------------------------
// M-step

/// `mm_steps` minorize-maximize updates per entry, each re-anchored.
Matrix m_step_phi(const IncidenceMatrix& m, const ElcaParams& p, const Responsibilities& resp, int mm_steps = 1);
/// Returns the full a vector; a_K stays 1.
Vector m_step_a(const IncidenceMatrix& m, const ElcaParams& p, const Responsibilities& resp, int mm_steps = 1);

struct MixingWeights {
  Vector pi;
  Vector tau;
};
MixingWeights m_step_mixing(const Responsibilities& resp);

// ---------------------------------------------------------------------------
// Fitting

struct FitOptions {
  double tol = 1e-6;
  int max_iter = 2000;
  int mm_steps = 1;
};

struct FitResult {
  ElcaParams params;
  Responsibilities resp;
  std::vector<double> loglik_trace;  // entry 0 at the initial parameters
  int n_iter = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  std::vector<Index> z1;  // argmax of cluster marginals
  std::vector<Index> z2;  // argmax of additional-cluster marginals

  double final_loglik() const { return loglik_trace.back(); }
};

/// EM from random_init(N, G, K, seed).
FitResult fit(const IncidenceMatrix& m, Index g, Index k, const FitOptions& opts, std::uint64_t seed);

/// EM from given starting parameters (phi and a_k, k < K, are clamped away
/// from 0 and 1 first).
FitResult fit_from(const IncidenceMatrix& m, const ElcaParams& init, const FitOptions& opts,
                   std::uint64_t seed = 0);

/// Best of `n_restarts` fits with seeds seed, seed+1, ...; ties go to the
/// lowest seed. Restarts run on up to `threads` threads; the result does not
/// depend on the thread count.
FitResult fit_restarts(const IncidenceMatrix& m, Index g, Index k, const FitOptions& opts, int n_restarts,
                       std::uint64_t seed, int threads = 1);

}  // namespace elca

#endif  // ELCA_EM_HPP
