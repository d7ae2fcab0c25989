#include "elca/sizedist.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace elca {

namespace {

constexpr double kConditionTol = 1e-10;
constexpr double kTailTarget = 1e-12;

// log of the Chernoff bound P(X >= t) <= e^-rate (e rate / t)^t, t > rate.
double log_poisson_tail_bound(double rate, double t) { return -rate + t * (1.0 + std::log(rate) - std::log(t)); }

Index auto_truncation(double max_rate) {
  const double log_target = std::log(kTailTarget);
  Index t = static_cast<Index>(std::floor(max_rate)) + 1;
  while (log_poisson_tail_bound(max_rate, static_cast<double>(t)) >= log_target) ++t;
  return t;
}

}  // namespace

double Pmf::mean() const {
  double s = 0.0;
  for (Index y = 0; y < prob.size(); ++y) s += static_cast<double>(y) * prob[y];
  return s;
}

double Pmf::variance() const {
  const double mu = mean();
  double s = 0.0;
  for (Index y = 0; y < prob.size(); ++y) s += (static_cast<double>(y) - mu) * (static_cast<double>(y) - mu) * prob[y];
  return s;
}

double total_variation(const Pmf& lhs, const Pmf& rhs) {
  const Index n = std::max(lhs.size(), rhs.size());
  double s = 0.0;
  for (Index y = 0; y < n; ++y) s += std::abs(lhs[y] - rhs[y]);
  return 0.5 * s;
}

Pmf poisson_binomial_pmf(const Eigen::Ref<const Vector>& probs) {
  const Index n = probs.size();
  for (Index i = 0; i < n; ++i)
    if (!(probs[i] >= 0.0 && probs[i] <= 1.0))
      throw ValidationError("probability " + std::to_string(i + 1) + " outside [0,1]");
  Vector dp = Vector::Zero(n + 1);
  dp[0] = 1.0;
  for (Index i = 0; i < n; ++i) {
    const double p = probs[i];
    const double q = 1.0 - p;
    for (Index y = i + 1; y >= 1; --y) dp[y] = dp[y] * q + dp[y - 1] * p;
    dp[0] *= q;
  }
  return Pmf{std::move(dp), 0.0};
}

Pmf size_pmf_lca(const LcaParams& p) {
  if (!validate(p).empty()) throw ValidationError("invalid LCA parameters");
  Vector out = Vector::Zero(p.n_vertices() + 1);
  for (Index g = 0; g < p.n_clusters(); ++g) out += p.pi[g] * poisson_binomial_pmf(p.p.col(g)).prob;
  return Pmf{std::move(out), 0.0};
}

Pmf size_pmf_elca(const ElcaParams& p) {
  require_valid(p);
  Vector out = Vector::Zero(p.n_vertices() + 1);
  for (Index g = 0; g < p.n_clusters(); ++g)
    for (Index k = 0; k < p.n_extra(); ++k) {
      const Vector probs = p.a[k] * p.phi.col(g);
      out += (p.pi[g] * p.tau[k]) * poisson_binomial_pmf(probs).prob;
    }
  return Pmf{std::move(out), 0.0};
}

Pmf empirical_size_pmf(const IncidenceMatrix& m) {
  if (m.n_edges() == 0) throw ValidationError("empirical size distribution needs at least one hyperedge");
  Vector out = Vector::Zero(m.n_vertices() + 1);
  for (Index s : edge_sizes(m)) out[s] += 1.0;
  out /= static_cast<double>(m.n_edges());
  return Pmf{std::move(out), 0.0};
}

MomentReport moments(const LcaParams& lca, const ElcaParams& elca) {
  const Index n = lca.n_vertices();
  const Index g_count = lca.n_clusters();
  if (elca.n_vertices() != n || elca.n_clusters() != g_count)
    throw ValidationError("LCA and ELCA parameters have different dimensions");
  if (!validate(lca).empty()) throw ValidationError("invalid LCA parameters");
  require_valid(elca);

  const double scale = elca.a.dot(elca.tau);
  const double scale_sq = elca.a.cwiseAbs2().dot(elca.tau);
  for (Index g = 0; g < g_count; ++g) {
    if (std::abs(lca.pi[g] - elca.pi[g]) > kConditionTol)
      throw ConditionError("pi differs between models at cluster " + std::to_string(g + 1));
    for (Index i = 0; i < n; ++i)
      if (std::abs(lca.p(i, g) - elca.phi(i, g) * scale) > kConditionTol)
        throw ConditionError("p != phi * sum(a tau) at (" + std::to_string(i + 1) + "," + std::to_string(g + 1) + ")");
  }

  const Vector& pi = lca.pi;
  // Marginal inclusion probabilities P(A_i = 1), P(B_i = 1).
  const Vector incl_lca = lca.p * pi;
  Vector incl_elca = Vector::Zero(n);
  for (Index g = 0; g < g_count; ++g)
    for (Index k = 0; k < elca.n_extra(); ++k)
      incl_elca += elca.phi.col(g) * (elca.a[k] * elca.tau[k] * elca.pi[g]);

  MomentReport r;
  r.mean_lca = incl_lca.sum();
  r.mean_elca = incl_elca.sum();
  r.var_lca = r.mean_lca - incl_lca.squaredNorm();
  r.var_elca = r.mean_elca - incl_elca.squaredNorm();

  double cov_lca = 0.0;
  double cov_elca = 0.0;
  double gap = 0.0;
  const double jensen = scale_sq - scale * scale;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      double joint_lca = 0.0;
      double joint_elca = 0.0;
      double joint_phi = 0.0;
      for (Index g = 0; g < g_count; ++g) {
        joint_lca += lca.p(i, g) * lca.p(j, g) * pi[g];
        const double pp = elca.phi(i, g) * elca.phi(j, g);
        joint_phi += pp * elca.pi[g];
        for (Index k = 0; k < elca.n_extra(); ++k) joint_elca += pp * elca.a[k] * elca.a[k] * elca.pi[g] * elca.tau[k];
      }
      cov_lca += joint_lca - incl_lca[i] * incl_lca[j];
      cov_elca += joint_elca - incl_elca[i] * incl_elca[j];
      gap += joint_phi;
    }
  r.var_lca += 2.0 * cov_lca;
  r.var_elca += 2.0 * cov_elca;
  r.var_gap = 2.0 * gap * jensen;

  const double direct = r.var_elca - r.var_lca;
  if (std::abs(direct - r.var_gap) > 1e-9 * std::max(1.0, std::abs(r.var_elca)))
    throw NumericalError("variance gap cross-check failed: direct " + std::to_string(direct) + ", factored " +
                         std::to_string(r.var_gap));
  return r;
}

Pmf poisson_mixture(const Eigen::Ref<const Vector>& weights, const Eigen::Ref<const Vector>& rates,
                    std::optional<Index> truncation) {
  if (weights.size() != rates.size() || rates.size() == 0)
    throw ValidationError("poisson mixture needs matching, non-empty weights and rates");
  for (Index c = 0; c < rates.size(); ++c)
    if (!(rates[c] > 0.0)) throw ValidationError("Poisson rate " + std::to_string(c + 1) + " is not positive");

  const double max_rate = rates.maxCoeff();
  const Index t = truncation ? *truncation : auto_truncation(max_rate);
  if (t < 1) throw ValidationError("truncation must be >= 1");

  Vector prob = Vector::Zero(t);
  for (Index c = 0; c < rates.size(); ++c) {
    const double log_rate = std::log(rates[c]);
    for (Index y = 0; y < t; ++y)
      prob[y] += weights[c] * std::exp(-rates[c] + static_cast<double>(y) * log_rate - std::lgamma(static_cast<double>(y) + 1.0));
  }
  double tail = 0.0;
  if (truncation)
    tail = std::max(0.0, weights.sum() - prob.sum());
  else
    tail = std::exp(log_poisson_tail_bound(max_rate, static_cast<double>(t)));
  return Pmf{std::move(prob), tail};
}

Pmf poisson_mixture_limit_lca(const Eigen::Ref<const Vector>& pi, const Eigen::Ref<const Vector>& lambdas,
                              std::optional<Index> truncation) {
  return poisson_mixture(pi, lambdas, truncation);
}

Pmf poisson_mixture_limit_elca(const Eigen::Ref<const Vector>& pi, const Eigen::Ref<const Vector>& tau,
                               const Eigen::Ref<const Matrix>& lambdas, std::optional<Index> truncation) {
  if (lambdas.rows() != pi.size() || lambdas.cols() != tau.size())
    throw ValidationError("rate matrix must be G x K");
  const Index g_count = pi.size();
  const Index k_count = tau.size();
  Vector weights(g_count * k_count);
  Vector rates(g_count * k_count);
  for (Index k = 0; k < k_count; ++k)
    for (Index g = 0; g < g_count; ++g) {
      weights[k * g_count + g] = pi[g] * tau[k];
      rates[k * g_count + g] = lambdas(g, k);
    }
  return poisson_mixture(weights, rates, truncation);
}

void write_pmf_csv(std::ostream& out, const Pmf& pmf) {
  const auto old_precision = out.precision(17);
  out << "size,probability\n";
  for (Index y = 0; y < pmf.size(); ++y) out << y << ',' << pmf.prob[y] << '\n';
  out.precision(old_precision);
}

}  // namespace elca
