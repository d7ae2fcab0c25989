#ifndef ELCA_NUMERIC_HPP
#define ELCA_NUMERIC_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Core>

namespace elca::numeric {

// log(sum_i exp(x_i)) with the max-shift. Returns -inf for an empty or
// all -inf argument.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0) return -std::numeric_limits<Scalar>::infinity();
  const Scalar top = x.maxCoeff();
  if (!std::isfinite(top)) return top;
  return top + std::log((x.derived().array() - top).exp().sum());
}

template <typename Scalar>
struct CubicRoots {
  std::array<Scalar, 3> values{};
  int count = 0;

  const Scalar* begin() const { return values.data(); }
  const Scalar* end() const { return values.data() + count; }
};

template <typename Scalar>
Scalar eval_monic_cubic(Scalar b, Scalar c, Scalar d, Scalar x) {
  return ((x + b) * x + c) * x + d;
}

// Real roots of x^3 + b x^2 + c x + d = 0. Trigonometric form for three
// real roots, Cardano otherwise; every root is then Newton-polished on the
// original polynomial.
template <typename Scalar>
CubicRoots<Scalar> solve_monic_cubic(Scalar b, Scalar c, Scalar d) {
  CubicRoots<Scalar> out;
  const Scalar b2 = b * b;
  const Scalar q = (b2 - Scalar(3) * c) / Scalar(9);
  const Scalar r = (b * (Scalar(2) * b2 - Scalar(9) * c) + Scalar(27) * d) / Scalar(54);
  const Scalar r2 = r * r;
  const Scalar q3 = q * q * q;
  const Scalar shift = b / Scalar(3);

  if (r2 < q3) {
    const Scalar t = std::acos(std::clamp(r / std::sqrt(q3), Scalar(-1), Scalar(1)));
    const Scalar m = Scalar(-2) * std::sqrt(q);
    const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    out.values = {m * std::cos(t / Scalar(3)) - shift,
                  m * std::cos((t + two_pi) / Scalar(3)) - shift,
                  m * std::cos((t - two_pi) / Scalar(3)) - shift};
    out.count = 3;
  } else {
    const Scalar u = std::cbrt(-r - std::copysign(std::sqrt(r2 - q3), r));
    const Scalar v = (u == Scalar(0)) ? Scalar(0) : q / u;
    out.values[0] = u + v - shift;
    out.count = 1;
    // Double root when the imaginary part of the conjugate pair vanishes.
    const Scalar imag = Scalar(0.5) * std::sqrt(Scalar(3)) * (u - v);
    if (std::abs(imag) <= Scalar(1e-12) * std::max(Scalar(1), std::abs(u))) {
      out.values[1] = Scalar(-0.5) * (u + v) - shift;
      out.count = 2;
    }
  }

  for (int k = 0; k < out.count; ++k) {
    Scalar x = out.values[k];
    for (int it = 0; it < 8; ++it) {
      const Scalar f = eval_monic_cubic(b, c, d, x);
      const Scalar df = (Scalar(3) * x + Scalar(2) * b) * x + c;
      if (f == Scalar(0) || df == Scalar(0)) break;
      const Scalar step = f / df;
      const Scalar next = x - step;
      if (!std::isfinite(next)) break;
      // Keep the step only if it does not worsen the residual.
      if (std::abs(eval_monic_cubic(b, c, d, next)) > std::abs(f)) break;
      x = next;
      if (std::abs(step) <= std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), std::abs(x))) break;
    }
    out.values[k] = x;
  }
  return out;
}

// Maximizer of a unimodal function on [lo, hi].
template <typename Scalar, typename F>
Scalar golden_section_max(F&& f, Scalar lo, Scalar hi, Scalar tol = Scalar(1e-12), int max_iter = 500) {
  const Scalar inv_phi = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
  Scalar x1 = hi - inv_phi * (hi - lo);
  Scalar x2 = lo + inv_phi * (hi - lo);
  Scalar f1 = f(x1);
  Scalar f2 = f(x2);
  for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    }
  }
  return (lo + hi) / Scalar(2);
}

// Root of a decreasing function on [lo, hi] by bisection. Assumes f(lo) > 0 > f(hi).
template <typename Scalar, typename F>
Scalar bisect_decreasing(F&& f, Scalar lo, Scalar hi, int max_iter = 200) {
  for (int it = 0; it < max_iter; ++it) {
    const Scalar mid = Scalar(0.5) * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > Scalar(0))
      lo = mid;
    else
      hi = mid;
  }
  return Scalar(0.5) * (lo + hi);
}

}  // namespace elca::numeric

#endif  // ELCA_NUMERIC_HPP
