#ifndef ELCA_SELECTION_HPP
#define ELCA_SELECTION_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <utility>
#include <vector>

#include "elca/em.hpp"
#include "elca/hypergraph.hpp"

namespace elca {

struct CvConfig {
  int n_cv = 20;
  double q = 0.7;  // probability a hyperedge goes to the training set
  FitOptions em;
  int n_restarts = 10;
  std::uint64_t seed = 1;
  int threads = 1;
  // Safety bounds on the greedy search.
  Index max_clusters = 50;
  Index max_extra = 50;
};

void validate(const CvConfig& cfg);

struct CvEstimate {
  double mean = 0.0;
  std::vector<double> replicates;  // NaN marks a failed replicate
  int failed = 0;
};

struct CvSplit {
  std::vector<Index> train;
  std::vector<Index> test;
};

/// Train/test partition for replicate `replicate` (0-based). Depends only on
/// (M, q, seed, replicate), so every (G, K) sees the same splits. Splits with
/// an empty side are redrawn from the next sub-seed.
CvSplit cv_split(Index n_edges, double q, std::uint64_t seed, int replicate);

/// Mean held-out log-likelihood over cfg.n_cv random splits.
CvEstimate cv_loglik(const IncidenceMatrix& m, Index g, Index k, const CvConfig& cfg);

using ModelKey = std::pair<Index, Index>;  // (G, K)

struct CvSelection {
  std::map<ModelKey, CvEstimate> table;
  std::vector<ModelKey> trajectory;
  Index g_opt = 1;
  Index k_opt = 1;
};

using CvScorer = std::function<CvEstimate(Index g, Index k)>;

/// Greedy search: grow K at fixed G while the score strictly improves, then
/// try G + 1 with K = 1 and continue while L(G+1, 1) > L(G, 1). The K search
/// restarts from 1 at every accepted G. Returns the best pair over all
/// evaluated models (ties: smallest (G, K)).
CvSelection greedy_search(const CvScorer& score, Index max_clusters = 50, Index max_extra = 50);
CvSelection greedy_search(const IncidenceMatrix& m, const CvConfig& cfg);

/// "G,K,mean,failed,rep_1,...,rep_n" rows in trajectory order.
void write_cv_table_csv(std::ostream& out, const CvSelection& sel);

}  // namespace elca

#endif  // ELCA_SELECTION_HPP
