#pragma once

#include <cmath>
#include <cstdint>

namespace warmgp {

/// Derives an independent stream seed from (seed, stream) via splitmix64
/// mixing. Used everywhere a reproducible substream is needed (per trial,
/// per right-hand side, per posterior sample).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Small deterministic generator (splitmix64 core). All randomness in the
/// library goes through this class so that results are reproducible across
/// standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller.
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  /// Chi-square with 3 degrees of freedom.
  double chi_square3() {
    const double a = normal(), b = normal(), c = normal();
    return a * a + b * b + c * c;
  }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

  /// Independent substream keyed by `stream`.
  Rng derive(std::uint64_t stream) const { return Rng(derive_seed(state_, stream)); }

 private:
  std::uint64_t state_;
};

}  // namespace warmgp
