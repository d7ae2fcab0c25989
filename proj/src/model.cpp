#include "elca/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "elca/rng.hpp"

namespace elca {

namespace {

constexpr double kSimplexTol = 1e-12;

void check_simplex(const Vector& w, const char* name, std::vector<Violation>& out) {
  if (w.size() == 0) {
    out.push_back({std::string(name) + " is empty", {}});
    return;
  }
  for (Index i = 0; i < w.size(); ++i)
    if (!(w[i] >= 0.0)) out.push_back({std::string(name) + " entry negative or NaN", {i + 1}});
  if (!(std::abs(w.sum() - 1.0) <= kSimplexTol)) out.push_back({std::string(name) + " does not sum to 1", {}});
}

void check_unit_box(const Matrix& m, const char* name, std::vector<Violation>& out) {
  for (Index g = 0; g < m.cols(); ++g)
    for (Index i = 0; i < m.rows(); ++i)
      if (!(m(i, g) >= 0.0 && m(i, g) <= 1.0))
        out.push_back({std::string(name) + " outside [0,1]", {i + 1, g + 1}});
}

}  // namespace

std::vector<Violation> validate(const ElcaParams& p) {
  std::vector<Violation> out;
  check_simplex(p.pi, "pi", out);
  check_simplex(p.tau, "tau", out);
  if (p.a.size() != p.tau.size()) out.push_back({"a and tau lengths differ", {}});
  if (p.phi.cols() != p.pi.size()) out.push_back({"phi columns differ from pi length", {}});
  if (p.phi.rows() < 1) out.push_back({"phi has no rows", {}});
  if (!p.vertex_labels.empty() && static_cast<Index>(p.vertex_labels.size()) != p.phi.rows())
    out.push_back({"vertex label count differs from phi rows", {}});
  if (p.a.size() > 0 && p.a[p.a.size() - 1] != 1.0) out.push_back({"a_K != 1", {p.a.size()}});
  for (Index k = 0; k < p.a.size(); ++k)
    if (!(p.a[k] > 0.0 && p.a[k] <= 1.0)) out.push_back({"a outside (0,1]", {k + 1}});
  check_unit_box(p.phi, "phi", out);
  return out;
}

std::vector<Violation> validate(const LcaParams& p) {
  std::vector<Violation> out;
  check_simplex(p.pi, "pi", out);
  if (p.p.cols() != p.pi.size()) out.push_back({"p columns differ from pi length", {}});
  if (p.p.rows() < 1) out.push_back({"p has no rows", {}});
  check_unit_box(p.p, "p", out);
  return out;
}

void require_valid(const ElcaParams& p) {
  const auto violations = validate(p);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid parameters:";
  for (const auto& v : violations) {
    msg << ' ' << v.what;
    if (!v.where.empty()) {
      msg << " at (";
      for (std::size_t i = 0; i < v.where.size(); ++i) msg << (i ? "," : "") << v.where[i];
      msg << ')';
    }
    msg << ';';
  }
  throw ValidationError(msg.str());
}

ElcaParams random_init(Index n, Index g, Index k, std::uint64_t seed) {
  if (n < 1 || g < 1 || k < 1) throw ValidationError("random_init needs N, G, K >= 1");
  Rng rng(seed);
  ElcaParams p;
  p.pi = rng.flat_dirichlet(g);
  p.tau = rng.flat_dirichlet(k);
  p.phi.resize(n, g);
  for (Index c = 0; c < g; ++c)
    for (Index i = 0; i < n; ++i) p.phi(i, c) = rng.uniform(0.05, 0.95);
  p.a.resize(k);
  for (Index c = 0; c + 1 < k; ++c) p.a[c] = rng.uniform(0.1, 0.9);
  p.a[k - 1] = 1.0;
  return p;
}

CanonicalOrder canonical_order(const ElcaParams& p) {
  CanonicalOrder order;
  order.clusters.resize(static_cast<std::size_t>(p.n_clusters()));
  std::iota(order.clusters.begin(), order.clusters.end(), Index{0});
  std::stable_sort(order.clusters.begin(), order.clusters.end(), [&](Index l, Index r) {
    if (p.pi[l] != p.pi[r]) return p.pi[l] > p.pi[r];
    return std::lexicographical_compare(p.phi.col(r).begin(), p.phi.col(r).end(), p.phi.col(l).begin(),
                                        p.phi.col(l).end());
  });

  const Index k = p.n_extra();
  order.extra.resize(static_cast<std::size_t>(k));
  std::iota(order.extra.begin(), order.extra.end(), Index{0});
  if (k > 1)
    std::stable_sort(order.extra.begin(), order.extra.end() - 1, [&](Index l, Index r) { return p.a[l] < p.a[r]; });
  return order;
}

ElcaParams reorder(const ElcaParams& p, const CanonicalOrder& order) {
  ElcaParams out;
  out.vertex_labels = p.vertex_labels;
  out.pi.resize(p.n_clusters());
  out.phi.resize(p.n_vertices(), p.n_clusters());
  for (std::size_t c = 0; c < order.clusters.size(); ++c) {
    const Index src = order.clusters[c];
    out.pi[static_cast<Index>(c)] = p.pi[src];
    out.phi.col(static_cast<Index>(c)) = p.phi.col(src);
  }
  out.tau.resize(p.n_extra());
  out.a.resize(p.n_extra());
  for (std::size_t c = 0; c < order.extra.size(); ++c) {
    out.tau[static_cast<Index>(c)] = p.tau[order.extra[c]];
    out.a[static_cast<Index>(c)] = p.a[order.extra[c]];
  }
  return out;
}

ElcaParams canonicalize(const ElcaParams& p) { return reorder(p, canonical_order(p)); }

LcaParams implied_lca(const ElcaParams& p) {
  const double mean_scale = p.a.dot(p.tau);
  return LcaParams{p.pi, p.phi * mean_scale};
}

ElcaParams as_elca(const LcaParams& p) {
  ElcaParams out;
  out.pi = p.pi;
  out.tau = Vector::Ones(1);
  out.a = Vector::Ones(1);
  out.phi = p.p;
  return out;
}

LabeledSample sample(const ElcaParams& p, Index m, std::uint64_t seed) {
  require_valid(p);
  if (m < 1) throw ValidationError("sample needs at least one hyperedge");
  Rng rng(seed);
  const Index n = p.n_vertices();
  BinaryMatrix cells(n, m);
  std::vector<Index> z1(static_cast<std::size_t>(m));
  std::vector<Index> z2(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) {
    const Index g = rng.categorical(p.pi);
    const Index k = rng.categorical(p.tau);
    z1[static_cast<std::size_t>(j)] = g;
    z2[static_cast<std::size_t>(j)] = k;
    for (Index i = 0; i < n; ++i) cells(i, j) = rng.bernoulli(p.a[k] * p.phi(i, g)) ? 1 : 0;
  }
  return LabeledSample{IncidenceMatrix(std::move(cells), p.vertex_labels), std::move(z1), std::move(z2)};
}

}  // namespace elca
