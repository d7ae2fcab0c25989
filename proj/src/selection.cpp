#include "elca/selection.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <set>

#include "elca/parallel.hpp"
#include "elca/rng.hpp"

namespace elca {

namespace {

// Stream ids keep split and fit seeds apart.
constexpr std::uint64_t kSplitStream = 0x5311700000000000ULL;
constexpr std::uint64_t kFitStream = 0xF170000000000000ULL;

}  // namespace

void validate(const CvConfig& cfg) {
  if (!(cfg.q > 0.0 && cfg.q < 1.0)) throw ValidationError("q must lie in (0,1)");
  if (cfg.n_cv < 1) throw ValidationError("n_cv must be >= 1");
  if (cfg.n_restarts < 1) throw ValidationError("n_restarts must be >= 1");
  if (!(cfg.em.tol > 0.0) || cfg.em.max_iter < 1) throw ValidationError("invalid EM controls");
}

CvSplit cv_split(Index n_edges, double q, std::uint64_t seed, int replicate) {
  if (n_edges < 2) throw ValidationError("cross-validation needs at least 2 hyperedges");
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(derive_seed(derive_seed(seed, kSplitStream + static_cast<std::uint64_t>(replicate)), attempt));
    CvSplit split;
    for (Index j = 0; j < n_edges; ++j) (rng.uniform() < q ? split.train : split.test).push_back(j);
    if (!split.train.empty() && !split.test.empty()) return split;
  }
}

CvEstimate cv_loglik(const IncidenceMatrix& m, Index g, Index k, const CvConfig& cfg) {
  validate(cfg);
  if (m.n_edges() < 2) throw ValidationError("cross-validation needs at least 2 hyperedges");

  CvEstimate est;
  est.replicates.assign(static_cast<std::size_t>(cfg.n_cv), std::numeric_limits<double>::quiet_NaN());
  // Replicates run in parallel; each restart loop is then sequential.
  parallel_for(cfg.n_cv, cfg.threads, [&](Index n) {
    const int rep = static_cast<int>(n);
    const CvSplit split = cv_split(m.n_edges(), cfg.q, cfg.seed, rep);
    const IncidenceMatrix train = m.select_edges(split.train);
    const IncidenceMatrix test = m.select_edges(split.test);
    try {
      const std::uint64_t fit_seed = derive_seed(cfg.seed, kFitStream + static_cast<std::uint64_t>(rep));
      const FitResult fitted = fit_restarts(train, g, k, cfg.em, cfg.n_restarts, fit_seed, 1);
      est.replicates[static_cast<std::size_t>(rep)] = loglik(test, fitted.params);
    } catch (const NumericalError&) {
      // Left as NaN and counted below.
    }
  });

  double sum = 0.0;
  int ok = 0;
  for (double v : est.replicates) {
    if (std::isnan(v)) {
      ++est.failed;
    } else {
      sum += v;
      ++ok;
    }
  }
  if (ok == 0)
    throw NumericalError("all " + std::to_string(cfg.n_cv) + " CV replicates failed for G=" + std::to_string(g) +
                         ", K=" + std::to_string(k));
  est.mean = sum / ok;
  return est;
}

CvSelection greedy_search(const CvScorer& score, Index max_clusters, Index max_extra) {
  CvSelection sel;
  auto eval = [&](Index g, Index k) -> double {
    const ModelKey key{g, k};
    auto it = sel.table.find(key);
    if (it == sel.table.end()) {
      it = sel.table.emplace(key, score(g, k)).first;
      sel.trajectory.push_back(key);
    }
    return it->second.mean;
  };

  Index g = 1;
  double base = eval(1, 1);  // L(G, 1) at the current G
  while (true) {
    Index k = 1;
    double current = base;
    while (k < max_extra) {
      const double trial = eval(g, k + 1);
      if (!(trial > current)) break;
      ++k;
      current = trial;
    }
    if (g >= max_clusters) break;
    const double next = eval(g + 1, 1);
    if (!(next > base)) break;
    ++g;
    base = next;
  }

  // Strict > while scanning the ordered map keeps the smallest key on ties.
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [key, est] : sel.table)
    if (est.mean > best) {
      best = est.mean;
      sel.g_opt = key.first;
      sel.k_opt = key.second;
    }
  return sel;
}

CvSelection greedy_search(const IncidenceMatrix& m, const CvConfig& cfg) {
  validate(cfg);
  return greedy_search([&](Index g, Index k) { return cv_loglik(m, g, k, cfg); }, cfg.max_clusters, cfg.max_extra);
}

void write_cv_table_csv(std::ostream& out, const CvSelection& sel) {
  std::size_t n_rep = 0;
  for (const auto& [key, est] : sel.table) n_rep = std::max(n_rep, est.replicates.size());
  const auto old_precision = out.precision(17);
  out << "G,K,mean,failed";
  for (std::size_t r = 1; r <= n_rep; ++r) out << ",rep_" << r;
  out << '\n';
  for (const auto& key : sel.trajectory) {
    const CvEstimate& est = sel.table.at(key);
    out << key.first << ',' << key.second << ',' << est.mean << ',' << est.failed;
    for (double v : est.replicates) {
      out << ',';
      if (!std::isnan(v)) out << v;
    }
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace elca
