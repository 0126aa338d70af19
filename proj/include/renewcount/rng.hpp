#pragma once

// Counter-based random stream: draw k of a stream with seed s is a pure
// function of (s, k), so streams replay bit-identically on every platform.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace renewcount {

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed) {}

  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }

  /// Next raw 64-bit value (SplitMix64 finalizer applied to seed + counter).
  std::uint64_t next_u64() {
    ++counter_;
    std::uint64_t z = seed_ + counter_ * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; consumes two uniforms per draw.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Independent stream derived from this one's seed.
  [[nodiscard]] RngStream split(std::uint64_t index) const {
    RngStream s(seed_ ^ (0xD1B54A32D192ED03ULL * (index + 1)));
    s.next_u64();
    return RngStream(s.next_u64());
  }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace renewcount
