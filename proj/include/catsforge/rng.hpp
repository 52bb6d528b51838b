#pragma once

#include <cstdint>
#include <vector>

namespace catsforge {

// SplitMix64 stream. Self-contained so that sampling is byte-identical
// across platforms and standard libraries; std::*_distribution is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  bool chance(double p) { return unit() < p; }

  long long range(long long lo, long long hi) {  // inclusive bounds
    return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

  // Index sampled proportionally to non-negative weights (sum must be > 0).
  std::size_t weighted(const std::vector<double>& w) {
    double total = 0;
    for (double x : w) total += x;
    double r = unit() * total;
    for (std::size_t i = 0; i < w.size(); ++i) {
      r -= w[i];
      if (r < 0) return i;
    }
    return w.size() - 1;
  }

  // Derives an independent substream seed from (a, b).
  static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    std::uint64_t z = a ^ (b * 0xC2B2AE3D27D4EB4FULL + 0x165667B19E3779F9ULL);
    z = (z ^ (z >> 29)) * 0xBF58476D1CE4E5B9ULL;
    return z ^ (z >> 32);
  }

 private:
  std::uint64_t state_;
};

}  // namespace catsforge
