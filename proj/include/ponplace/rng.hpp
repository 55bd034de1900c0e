#pragma once

#include <cstdint>
#include <random>

namespace ponplace {

// Deterministic uniform draws built on std::mt19937_64.
//
// The engine itself is pinned by the C++ standard (same seed -> same 64-bit
// stream on every conforming implementation), but std::uniform_real_distribution
// is not, so the mapping from raw bits to [lo, hi) is done here explicitly:
// the top 53 bits become a double in [0, 1), then the result is scaled.
// Identical seeds therefore reproduce identical instances across platforms.
class UniformRng {
 public:
  explicit UniformRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [lo, hi); requires lo <= hi. Returns lo when the range is empty.
  double uniform(double lo, double hi) {
    const std::uint64_t bits = engine_() >> 11;           // 53 random bits
    const double u = static_cast<double>(bits) * 0x1.0p-53;  // [0, 1)
    return lo + u * (hi - lo);
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ponplace
