#include <doctest.h>

#include <cmath>

#include "elca/em.hpp"
#include "elca/model.hpp"
#include "oracles.hpp"

using namespace elca;

namespace {

ElcaParams two_by_two() {
  ElcaParams p;
  p.pi = Vector{{0.2, 0.8}};
  p.tau = Vector{{0.3, 0.7}};
  p.a = Vector{{0.5, 1.0}};
  p.phi = Matrix(3, 2);
  p.phi << 0.1, 0.9, 0.2, 0.8, 0.3, 0.7;
  return p;
}

bool has_violation(const std::vector<Violation>& v, const std::string& what) {
  for (const auto& x : v)
    if (x.what.find(what) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("validate accepts well-formed parameters") {
  ElcaParams p;
  p.pi = Vector{{0.5, 0.5}};
  p.tau = Vector::Ones(1);
  p.a = Vector::Ones(1);
  p.phi = Matrix::Constant(3, 2, 0.4);
  CHECK(validate(p).empty());
}

TEST_CASE("validate reports the pinned scale factor and out-of-range phi with indices") {
  ElcaParams p = two_by_two();
  p.a = Vector{{0.4, 0.9}};
  CHECK(has_violation(validate(p), "a_K != 1"));

  p = two_by_two();
  p.phi(0, 0) = 1.2;
  const auto v = validate(p);
  REQUIRE(v.size() == 1);
  CHECK(v[0].where == std::vector<Index>{1, 1});

  p = two_by_two();
  p.pi = Vector{{0.3, 0.3}};
  CHECK(has_violation(validate(p), "pi does not sum to 1"));
  CHECK_THROWS_AS(require_valid(p), ValidationError);
}

TEST_CASE("random_init is valid, deterministic per seed and seed-sensitive") {
  const auto a = random_init(7, 3, 2, 42);
  CHECK(validate(a).empty());
  CHECK(random_init(7, 3, 2, 42) == a);
  CHECK_FALSE(random_init(7, 3, 2, 43) == a);
  CHECK((a.phi.array() >= 0.05).all());
  CHECK((a.phi.array() <= 0.95).all());
  CHECK(a.a[0] >= 0.1);
  CHECK(a.a[0] <= 0.9);
  CHECK(a.a[1] == 1.0);
  CHECK_THROWS_AS(random_init(0, 1, 1, 1), ValidationError);
}

TEST_CASE("canonicalize orders clusters by weight and keeps the pinned scale last") {
  const ElcaParams p = two_by_two();
  const ElcaParams c = canonicalize(p);
  CHECK(c.pi[0] == 0.8);
  CHECK(c.pi[1] == 0.2);
  CHECK(c.phi.col(0) == p.phi.col(1));
  CHECK(c.phi.col(1) == p.phi.col(0));
  CHECK(canonicalize(c) == c);

  ElcaParams q = random_init(4, 2, 3, 5);
  q.a = Vector{{0.8, 0.3, 1.0}};
  const ElcaParams cq = canonicalize(q);
  CHECK(cq.a == Vector{{0.3, 0.8, 1.0}});
  CHECK(cq.tau[0] == q.tau[1]);
  CHECK(cq.tau[1] == q.tau[0]);
}

TEST_CASE("canonicalize preserves the likelihood") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const ElcaParams p = random_init(5, 3, 3, seed);
    const auto m = oracle::random_matrix(5, 7, 0.4, seed + 100);
    const ElcaParams c = canonicalize(p);
    CHECK(canonicalize(c) == c);
    CHECK(std::abs(oracle::loglik(m, p) - oracle::loglik(m, c)) <= 1e-12);
  }
}

TEST_CASE("implied LCA scales phi by the mean scale factor") {
  ElcaParams p = random_init(3, 2, 1, 9);
  CHECK(implied_lca(p).p == p.phi);

  ElcaParams h;
  h.pi = Vector{{0.5, 0.5}};
  h.tau = Vector{{0.5, 0.5}};
  h.a = Vector{{0.5, 1.0}};
  h.phi = Matrix::Constant(4, 2, 0.5);
  CHECK((implied_lca(h).p.array() - 0.375).abs().maxCoeff() == doctest::Approx(0.0));

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ElcaParams r = random_init(4, 3, 3, seed);
    const LcaParams l = implied_lca(r);
    CHECK(l.pi == r.pi);
    for (Index i = 0; i < 4; ++i)
      for (Index g = 0; g < 3; ++g) {
        double s = 0.0;
        for (Index k = 0; k < 3; ++k) s += r.phi(i, g) * r.a[k] * r.tau[k];
        CHECK(l.p(i, g) == doctest::Approx(s).epsilon(1e-14));
      }
  }
}

TEST_CASE("implied LCA has the same marginal cell probabilities") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const ElcaParams r = random_init(4, 2, 3, seed);
    const LcaParams l = implied_lca(r);
    for (Index i = 0; i < 4; ++i) {
      double elca_marginal = 0.0;
      for (Index g = 0; g < 2; ++g)
        for (Index k = 0; k < 3; ++k) elca_marginal += r.pi[g] * r.tau[k] * r.a[k] * r.phi(i, g);
      double lca_marginal = 0.0;
      for (Index g = 0; g < 2; ++g) lca_marginal += l.pi[g] * l.p(i, g);
      CHECK(elca_marginal == doctest::Approx(lca_marginal).epsilon(1e-13));
    }
  }
}

TEST_CASE("sampler degenerate cases") {
  ElcaParams p;
  p.pi = Vector::Ones(1);
  p.tau = Vector::Ones(1);
  p.a = Vector::Ones(1);
  p.phi = Matrix::Ones(3, 1);
  CHECK((sample(p, 20, 1).matrix.cells().array() == 1).all());
  p.phi.setZero();
  CHECK((sample(p, 20, 1).matrix.cells().array() == 0).all());
  CHECK_THROWS_AS(sample(p, 0, 1), ValidationError);
}

TEST_CASE("sampler is deterministic per seed") {
  const ElcaParams p = random_init(6, 2, 2, 3);
  const auto a = sample(p, 50, 8);
  const auto b = sample(p, 50, 8);
  CHECK(a.matrix == b.matrix);
  CHECK(a.z1 == b.z1);
  CHECK(a.z2 == b.z2);
  CHECK_FALSE(sample(p, 50, 9).matrix == a.matrix);
}

TEST_CASE("sampler frequencies follow the inclusion probability") {
  ElcaParams p;
  p.pi = Vector::Ones(1);
  p.tau = Vector::Ones(1);
  p.a = Vector::Ones(1);
  p.phi = Matrix::Constant(4, 1, 0.3);
  const auto s = sample(p, 50000, 77);
  for (Index i = 0; i < 4; ++i) {
    const double freq = s.matrix.cells().row(i).cast<double>().mean();
    CHECK(std::abs(freq - 0.3) < 0.01);
  }
}

TEST_CASE("sampler respects labels: cell means given (g, k) approach a_k phi_ig") {
  ElcaParams p;
  p.pi = Vector{{0.5, 0.5}};
  p.tau = Vector{{0.4, 0.6}};
  p.a = Vector{{0.3, 1.0}};
  p.phi = Matrix(3, 2);
  p.phi << 0.9, 0.2, 0.5, 0.6, 0.1, 0.8;
  const auto s = sample(p, 40000, 123);
  for (Index g = 0; g < 2; ++g)
    for (Index k = 0; k < 2; ++k) {
      Vector hits = Vector::Zero(3);
      double count = 0.0;
      for (Index j = 0; j < s.matrix.n_edges(); ++j) {
        if (s.z1[static_cast<std::size_t>(j)] != g || s.z2[static_cast<std::size_t>(j)] != k) continue;
        count += 1.0;
        for (Index i = 0; i < 3; ++i) hits[i] += s.matrix(i, j) ? 1.0 : 0.0;
      }
      REQUIRE(count > 1000);
      for (Index i = 0; i < 3; ++i) {
        const double q = p.a[k] * p.phi(i, g);
        const double sigma = std::sqrt(q * (1.0 - q) / count);
        CHECK(std::abs(hits[i] / count - q) <= 3.0 * sigma + 1e-12);
      }
    }
}
