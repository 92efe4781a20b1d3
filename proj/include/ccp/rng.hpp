#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

#include "ccp/types.hpp"

namespace ccp {

/// Mixes a seed into an independent stream id.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// mt19937_64 with fixed output conversions. The std:: distributions are
/// implementation-defined, which would tie generated instances and traces to
/// the standard library build; these conversions keep them portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive, unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = std::uint64_t(hi - lo) + 1;
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % span;
    std::uint64_t r;
    do {
      r = gen_();
    } while (r >= limit);
    return lo + std::int64_t(r % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller (no spare caching).
  double gaussian() {
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  Vector gaussian_vector(int n) {
    Vector out(n);
    for (int i = 0; i < n; ++i) out(i) = gaussian();
    return out;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ccp
