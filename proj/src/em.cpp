#include "elca/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "elca/parallel.hpp"

namespace elca {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// x log(y) with the 0 * log(0) = 0 convention.
double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }
double xlog1my(double x, double y) { return x == 0.0 ? 0.0 : x * std::log1p(-y); }

void check_dims(const IncidenceMatrix& m, const ElcaParams& p) {
  if (m.n_vertices() != p.n_vertices())
    throw ValidationError("dimension mismatch: hypergraph has " + std::to_string(m.n_vertices()) +
                          " vertices, parameters have " + std::to_string(p.n_vertices()));
  if (p.n_clusters() < 1 || p.n_extra() < 1 || p.a.size() != p.n_extra() || p.phi.cols() != p.n_clusters())
    throw ValidationError("inconsistent parameter dimensions");
}

// M x (G*K) matrix of log pi_g + log tau_k + log P(x_j | g, k).
Matrix log_joint(const Matrix& x, const ElcaParams& p) {
  const Index n = x.rows();
  const Index m = x.cols();
  const Index g_count = p.n_clusters();
  const Index k_count = p.n_extra();
  const Index cols = g_count * k_count;

  Matrix probs(n, cols);
  for (Index k = 0; k < k_count; ++k)
    for (Index g = 0; g < g_count; ++g)
      probs.col(Responsibilities::column(g, k, g_count)) = p.a[k] * p.phi.col(g);

  Matrix out(m, cols);
  const bool interior = (probs.array() > 0.0).all() && (probs.array() < 1.0).all();
  if (interior) {
    // log P = x' (log q - log(1-q)) + sum_i log(1-q): one matrix product.
    const Matrix log1m = (-probs.array()).log1p().matrix();
    const Matrix logit = probs.array().log().matrix() - log1m;
    out.noalias() = x.transpose() * logit;
    out.rowwise() += log1m.colwise().sum();
  } else {
    // Degenerate probabilities: 0 * log(0) must not poison the sum.
    for (Index c = 0; c < cols; ++c)
      for (Index j = 0; j < m; ++j) {
        double s = 0.0;
        for (Index i = 0; i < n; ++i) s += x(i, j) != 0.0 ? std::log(probs(i, c)) : std::log1p(-probs(i, c));
        out(j, c) = s;
      }
  }
  for (Index k = 0; k < k_count; ++k)
    for (Index g = 0; g < g_count; ++g)
      out.col(Responsibilities::column(g, k, g_count)).array() += std::log(p.pi[g]) + std::log(p.tau[k]);
  return out;
}

Vector row_log_sum_exp(const Matrix& log_joint) {
  Vector out(log_joint.rows());
  for (Index j = 0; j < log_joint.rows(); ++j) out[j] = numeric::log_sum_exp(log_joint.row(j));
  return out;
}

struct EStep {
  Responsibilities resp;
  double loglik;
};

EStep e_step_impl(const Matrix& x, const ElcaParams& p) {
  Matrix lj = log_joint(x, p);
  const Vector lse = row_log_sum_exp(lj);
  for (Index j = 0; j < lse.size(); ++j)
    if (!std::isfinite(lse[j]))
      throw NumericalError("degenerate hyperedge " + std::to_string(j + 1) + ": zero likelihood under every (g,k)");
  lj.colwise() -= lse;
  lj = lj.array().exp().matrix();
  return EStep{Responsibilities(std::move(lj), p.n_clusters(), p.n_extra()), lse.sum()};
}

// Sums of responsibilities split by x_ij. ones(i, c) = sum_j zeta(j, c) x_ij.
struct SufficientStats {
  Matrix ones;       // N x GK
  Matrix zeros;      // N x GK
  Vector size_mass;  // GK: sum_j zeta(j, c) |e_j|
};

SufficientStats sufficient_stats(const Matrix& x, const Responsibilities& resp) {
  const Matrix& z = resp.joint();
  SufficientStats s;
  s.ones.noalias() = x * z;
  const Eigen::RowVectorXd totals = z.colwise().sum();
  s.zeros = (-s.ones).rowwise() + totals;
  s.zeros = s.zeros.cwiseMax(0.0);
  s.size_mass.noalias() = z.transpose() * x.colwise().sum().transpose();
  return s;
}

Matrix phi_update(const SufficientStats& s, const ElcaParams& p, int mm_steps) {
  const Index n = p.n_vertices();
  const Index g_count = p.n_clusters();
  const Index k_count = p.n_extra();
  Matrix out(n, g_count);
  PhiObjective obj{Vector(k_count), Vector(k_count), p.a};
  for (Index g = 0; g < g_count; ++g)
    for (Index i = 0; i < n; ++i) {
      for (Index k = 0; k < k_count; ++k) {
        const Index c = Responsibilities::column(g, k, g_count);
        obj.ones[k] = s.ones(i, c);
        obj.zeros[k] = s.zeros(i, c);
      }
      double phi = p.phi(i, g);
      try {
        for (int step = 0; step < mm_steps; ++step) phi = PhiMinorizer::at(obj, phi).maximize().value;
      } catch (const NumericalError& e) {
        throw NumericalError("phi(" + std::to_string(i + 1) + "," + std::to_string(g + 1) + "): " + e.what());
      }
      out(i, g) = phi;
    }
  return out;
}

Vector a_update(const SufficientStats& s, const ElcaParams& p, int mm_steps) {
  const Index n = p.n_vertices();
  const Index g_count = p.n_clusters();
  const Index k_count = p.n_extra();
  Vector out = p.a;
  AObjective obj{0.0, Matrix(n, g_count), p.phi};
  for (Index k = 0; k + 1 < k_count; ++k) {
    obj.ones = 0.0;
    for (Index g = 0; g < g_count; ++g) {
      const Index c = Responsibilities::column(g, k, g_count);
      obj.ones += s.size_mass[c];
      obj.zeros.col(g) = s.zeros.col(c);
    }
    double a = p.a[k];
    for (int step = 0; step < mm_steps; ++step) a = AMinorizer::at(obj, a).maximize();
    out[k] = a;
  }
  return out;
}

ElcaParams clamp_interior(ElcaParams p) {
  p.phi = p.phi.cwiseMax(kProbFloor).cwiseMin(1.0 - kProbFloor);
  for (Index k = 0; k + 1 < p.a.size(); ++k) p.a[k] = std::clamp(p.a[k], kProbFloor, 1.0 - kProbFloor);
  return p;
}

std::vector<Index> row_argmax(const Matrix& m) {
  std::vector<Index> out(static_cast<std::size_t>(m.rows()));
  for (Index j = 0; j < m.rows(); ++j) m.row(j).maxCoeff(&out[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Matrix Responsibilities::cluster_marginals() const {
  Matrix out = Matrix::Zero(n_edges(), n_clusters_);
  for (Index k = 0; k < n_extra_; ++k) out += joint_.middleCols(k * n_clusters_, n_clusters_);
  return out;
}

Matrix Responsibilities::extra_marginals() const {
  Matrix out(n_edges(), n_extra_);
  for (Index k = 0; k < n_extra_; ++k) out.col(k) = joint_.middleCols(k * n_clusters_, n_clusters_).rowwise().sum();
  return out;
}

double loglik(const IncidenceMatrix& m, const ElcaParams& p) { return edge_logliks(m, p).sum(); }

double loglik(const IncidenceMatrix& m, const LcaParams& p) { return loglik(m, as_elca(p)); }

Vector edge_logliks(const IncidenceMatrix& m, const ElcaParams& p) {
  check_dims(m, p);
  return row_log_sum_exp(log_joint(m.to_real(), p));
}

double complete_loglik(const IncidenceMatrix& m, const ElcaParams& p, std::span<const Index> z1,
                       std::span<const Index> z2) {
  check_dims(m, p);
  const auto n_edges = static_cast<std::size_t>(m.n_edges());
  if (z1.size() != n_edges || z2.size() != n_edges) throw ValidationError("label vectors must have one entry per edge");
  double total = 0.0;
  for (std::size_t j = 0; j < n_edges; ++j) {
    const Index g = z1[j];
    const Index k = z2[j];
    if (g < 0 || g >= p.n_clusters() || k < 0 || k >= p.n_extra())
      throw ValidationError("invalid label at edge " + std::to_string(j + 1));
    double s = std::log(p.pi[g]) + std::log(p.tau[k]);
    for (Index i = 0; i < m.n_vertices(); ++i) {
      const double x = m(i, static_cast<Index>(j)) ? 1.0 : 0.0;
      s += xlogy(x, p.a[k]) + xlogy(x, p.phi(i, g)) + xlog1my(1.0 - x, p.a[k] * p.phi(i, g));
    }
    total += s;
  }
  return total;
}

Responsibilities e_step(const IncidenceMatrix& m, const ElcaParams& p) {
  check_dims(m, p);
  return e_step_impl(m.to_real(), p).resp;
}

// ---------------------------------------------------------------------------

double PhiObjective::operator()(double phi) const {
  double s = 0.0;
  for (Index k = 0; k < a.size(); ++k) s += xlogy(ones[k], phi) + xlog1my(zeros[k], a[k] * phi);
  return s;
}

PhiMinorizer PhiMinorizer::at(const PhiObjective& objective, double anchor) {
  PhiMinorizer q;
  q.anchor = anchor;
  const Index k_count = objective.a.size();
  for (Index k = 0; k < k_count; ++k) {
    q.A1 += objective.ones[k];
    const double a = objective.a[k];
    const double w = objective.zeros[k];
    if (k + 1 == k_count || a >= 1.0) {
      // Pinned scale: log(1 - phi) kept exactly.
      q.A2 += w;
    } else if (w != 0.0) {
      q.B1 += w * (-a / (1.0 - a * anchor));
      q.B2 += w * 0.5 * (-a * a / ((1.0 - a) * (1.0 - a)));
      q.offset += w * std::log1p(-a * anchor);
    }
  }
  return q;
}

double PhiMinorizer::operator()(double phi) const {
  const double d = phi - anchor;
  return xlogy(A1, phi) + xlog1my(A2, phi) + B1 * d + B2 * d * d + offset;
}

double PhiMinorizer::derivative(double phi) const {
  return A1 / phi - A2 / (1.0 - phi) + B1 + 2.0 * B2 * (phi - anchor);
}

PhiMinorizer::Cubic PhiMinorizer::cubic() const {
  const double C = B1 - 2.0 * B2 * anchor;
  const double two_b2 = 2.0 * B2;
  return Cubic{-(two_b2 - C) / two_b2, -(C - A1 - A2) / two_b2, -A1 / two_b2};
}

PhiMinorizer::Argmax PhiMinorizer::maximize(double lo, double hi) const {
  struct Candidate {
    double x;
    bool interior;
  };
  std::vector<Candidate> candidates;
  auto add_root = [&](double r) {
    if (std::isfinite(r) && r > lo && r < hi) candidates.push_back({r, true});
  };

  if (B2 < 0.0) {
    const Cubic poly = cubic();
    for (double r : numeric::solve_monic_cubic(poly.b, poly.c, poly.d)) add_root(r);
  } else if (B1 == 0.0) {
    if (A1 + A2 > 0.0) add_root(A1 / (A1 + A2));
  } else {
    // -B1 phi^2 + (B1 - A1 - A2) phi + A1 = 0
    const double qa = -B1;
    const double qb = B1 - A1 - A2;
    const double qc = A1;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double t = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
      if (t != 0.0) add_root(qc / t);
      add_root(t / qa);
    }
  }

  // The cubic can lose the stationary point to cancellation; the derivative
  // is monotone, so bisection recovers it.
  if (candidates.empty() && derivative(lo) > 0.0 && derivative(hi) < 0.0)
    add_root(numeric::bisect_decreasing([this](double x) { return derivative(x); }, lo, hi));

  candidates.push_back({std::clamp(anchor, lo, hi), false});
  candidates.push_back({lo, false});
  candidates.push_back({hi, false});

  Argmax best{candidates.front().x, candidates.front().interior};
  double best_value = kNegInf;
  for (const auto& c : candidates) {
    const double v = (*this)(c.x);
    if (v > best_value) {
      best_value = v;
      best = {c.x, c.interior};
    }
  }
  if (!std::isfinite(best_value)) {
    const double x = numeric::golden_section_max([this](double t) { return (*this)(t); }, lo, hi);
    if (!std::isfinite((*this)(x))) throw NumericalError("phi minorizer has no finite maximum");
    best = {x, false};
  }
  return best;
}

// ---------------------------------------------------------------------------

double AObjective::operator()(double a) const {
  double s = xlogy(ones, a);
  for (Index g = 0; g < phi.cols(); ++g)
    for (Index i = 0; i < phi.rows(); ++i) s += xlog1my(zeros(i, g), a * phi(i, g));
  return s;
}

AMinorizer AMinorizer::at(const AObjective& objective, double anchor) {
  AMinorizer q;
  q.anchor = anchor;
  q.A = objective.ones;
  for (Index g = 0; g < objective.phi.cols(); ++g)
    for (Index i = 0; i < objective.phi.rows(); ++i) {
      const double w = objective.zeros(i, g);
      if (w == 0.0) continue;
      const double phi = objective.phi(i, g);
      q.B += w * (-phi / (1.0 - anchor * phi));
      q.C += w * 0.5 * (-phi * phi / ((1.0 - phi) * (1.0 - phi)));
      q.offset += w * std::log1p(-anchor * phi);
    }
  if (!std::isfinite(q.C)) throw NumericalError("a minorizer curvature is unbounded (phi = 1 with non-member mass)");
  return q;
}

double AMinorizer::operator()(double a) const {
  const double d = a - anchor;
  return xlogy(A, a) + B * d + C * d * d + offset;
}

double AMinorizer::maximize(double lo, double hi) const {
  double a = anchor;
  if (C < 0.0) {
    const double D = B / (2.0 * C) - anchor;
    const double E = -A / (2.0 * C);
    const double root = std::sqrt(E + 0.25 * D * D);
    // Positive root of a^2 + D a - E = 0, written to avoid cancellation.
    a = D > 0.0 ? E / (root + 0.5 * D) : root - 0.5 * D;
  } else if (B >= 0.0) {
    if (A > 0.0 || B > 0.0) a = hi;
  } else {
    a = A > 0.0 ? -A / B : lo;
  }
  return std::clamp(a, lo, hi);
}

// ---------------------------------------------------------------------------

Matrix m_step_phi(const IncidenceMatrix& m, const ElcaParams& p, const Responsibilities& resp, int mm_steps) {
  check_dims(m, p);
  return phi_update(sufficient_stats(m.to_real(), resp), p, mm_steps);
}

Vector m_step_a(const IncidenceMatrix& m, const ElcaParams& p, const Responsibilities& resp, int mm_steps) {
  check_dims(m, p);
  return a_update(sufficient_stats(m.to_real(), resp), p, mm_steps);
}

MixingWeights m_step_mixing(const Responsibilities& resp) {
  const Eigen::RowVectorXd totals = resp.joint().colwise().sum();
  const Index g_count = resp.n_clusters();
  const Index k_count = resp.n_extra();
  MixingWeights w{Vector::Zero(g_count), Vector::Zero(k_count)};
  for (Index k = 0; k < k_count; ++k)
    for (Index g = 0; g < g_count; ++g) {
      const double t = totals[Responsibilities::column(g, k, g_count)];
      w.pi[g] += t;
      w.tau[k] += t;
    }
  w.pi /= w.pi.sum();
  w.tau /= w.tau.sum();
  return w;
}

// ---------------------------------------------------------------------------

FitResult fit_from(const IncidenceMatrix& m, const ElcaParams& init, const FitOptions& opts, std::uint64_t seed) {
  check_dims(m, init);
  if (m.n_edges() < 1) throw ValidationError("cannot fit a hypergraph without hyperedges");
  if (!(opts.tol > 0.0)) throw ValidationError("tol must be positive");
  if (opts.max_iter < 1 || opts.mm_steps < 1) throw ValidationError("max_iter and mm_steps must be >= 1");

  ElcaParams params = clamp_interior(init);
  params.vertex_labels = m.vertex_labels();
  require_valid(params);

  const Matrix x = m.to_real();
  FitResult result;
  result.seed = seed;

  EStep current = e_step_impl(x, params);
  result.loglik_trace.push_back(current.loglik);

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    try {
      const SufficientStats stats = sufficient_stats(x, current.resp);
      ElcaParams next = params;
      next.phi = phi_update(stats, params, opts.mm_steps);
      next.a = a_update(stats, next, opts.mm_steps);
      const MixingWeights w = m_step_mixing(current.resp);
      next.pi = w.pi;
      next.tau = w.tau;

      EStep updated = e_step_impl(x, next);
      const double delta = updated.loglik - current.loglik;
      params = std::move(next);
      current = std::move(updated);
      result.loglik_trace.push_back(current.loglik);
      result.n_iter = iter;
      if (delta < opts.tol) {
        result.converged = true;
        break;
      }
    } catch (const NumericalError& e) {
      throw NumericalError("EM iteration " + std::to_string(iter) + ": " + e.what());
    }
  }

  const CanonicalOrder order = canonical_order(params);
  result.params = reorder(params, order);
  const Index g_count = params.n_clusters();
  const Index k_count = params.n_extra();
  Matrix joint(m.n_edges(), g_count * k_count);
  for (Index k = 0; k < k_count; ++k)
    for (Index g = 0; g < g_count; ++g)
      joint.col(Responsibilities::column(g, k, g_count)) = current.resp.joint().col(Responsibilities::column(
          order.clusters[static_cast<std::size_t>(g)], order.extra[static_cast<std::size_t>(k)], g_count));
  result.resp = Responsibilities(std::move(joint), g_count, k_count);
  result.z1 = row_argmax(result.resp.cluster_marginals());
  result.z2 = row_argmax(result.resp.extra_marginals());
  return result;
}

FitResult fit(const IncidenceMatrix& m, Index g, Index k, const FitOptions& opts, std::uint64_t seed) {
  return fit_from(m, random_init(m.n_vertices(), g, k, seed), opts, seed);
}

FitResult fit_restarts(const IncidenceMatrix& m, Index g, Index k, const FitOptions& opts, int n_restarts,
                       std::uint64_t seed, int threads) {
  if (n_restarts < 1) throw ValidationError("n_restarts must be >= 1");
  std::vector<std::optional<FitResult>> results(static_cast<std::size_t>(n_restarts));
  std::vector<std::string> errors(static_cast<std::size_t>(n_restarts));
  parallel_for(n_restarts, threads, [&](Index r) {
    const auto slot = static_cast<std::size_t>(r);
    try {
      FitResult res = fit(m, g, k, opts, seed + static_cast<std::uint64_t>(r));
      if (std::isnan(res.final_loglik())) throw NumericalError("log-likelihood is NaN");
      results[slot] = std::move(res);
    } catch (const NumericalError& e) {
      errors[slot] = e.what();
    }
  });

  std::optional<FitResult> best;
  for (auto& r : results)
    if (r && (!best || r->final_loglik() > best->final_loglik())) best = std::move(r);
  if (best) return std::move(*best);

  std::string msg = "all " + std::to_string(n_restarts) + " restarts failed:";
  for (std::size_t r = 0; r < errors.size(); ++r) msg += " [seed " + std::to_string(seed + r) + "] " + errors[r];
  throw NumericalError(msg);
}

}  // namespace elca
