#ifndef ELCA_RNG_HPP
#define ELCA_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "elca/types.hpp"

namespace elca {

// Derives an independent stream seed from a base seed and a stream id.
// SplitMix64 finalizer; stable across platforms.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Thin wrapper over mt19937_64. The std:: distributions are implementation
// defined, so draws are built directly from the raw 64-bit stream to keep
// output identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard exponential; 1 - U avoids log(0).
  double exponential() { return -std::log1p(-uniform()); }

  bool bernoulli(double p) { return uniform() < p; }

  // Index drawn from a probability vector (need not be exactly normalized).
  Index categorical(const Eigen::Ref<const Vector>& weights) {
    const double u = uniform() * weights.sum();
    double acc = 0.0;
    for (Index i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    // Rounding left u beyond the last partial sum; take the last positive entry.
    for (Index i = weights.size() - 1; i > 0; --i)
      if (weights[i] > 0.0) return i;
    return 0;
  }

  // Flat Dirichlet via normalized exponentials.
  Vector flat_dirichlet(Index n) {
    Vector w(n);
    for (Index i = 0; i < n; ++i) w[i] = exponential();
    return w / w.sum();
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace elca

#endif  // ELCA_RNG_HPP
