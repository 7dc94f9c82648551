#pragma once

#include <cmath>
#include <cstdint>

namespace curv {

/// Deterministic, platform-independent random stream (splitmix64 core).
/// Streams derived from (seed, counter) are independent, which keeps
/// multistart batches and per-sample experiment loops reproducible no
/// matter how the loop is scheduled.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ull) {
    // warm up so nearby seeds decorrelate
    next_u64();
    next_u64();
  }

  /// Sub-stream `k` of this stream's seed.
  static Rng stream(std::uint64_t seed, std::uint64_t k) {
    Rng r(seed);
    r.state_ ^= 0xbf58476d1ce4e5b9ull * (k + 1);
    r.next_u64();
    return r;
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller (cached pair).
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    cached_ = r * std::sin(6.283185307179586476925287 * u2);
    have_cached_ = true;
    return r * std::cos(6.283185307179586476925287 * u2);
  }

  /// Uniform integer in [0, m).
  std::uint64_t below(std::uint64_t m) { return next_u64() % m; }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace curv
