#pragma once

#include <cstdint>

namespace wleach {

/// SplitMix64 (Steele, Lea & Flood 2014): a counter-based generator whose
/// output depends only on the seed and the draw index, so sequences are
/// identical on every platform. Conversions to reals and bounded integers
/// are done here rather than through <random> distributions, whose output is
/// implementation-defined.
///
/// Generator version 1. Changing anything below changes every run's output.
class Rng {
 public:
  static constexpr int kVersion = 1;

  explicit Rng(std::uint64_t seed) noexcept : seed_(seed), state_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t draws() const noexcept { return draws_; }

  std::uint64_t next_u64() noexcept {
    ++draws_;
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, m) by rejection; exact for every m >= 1.
  std::uint64_t below(std::uint64_t m) noexcept {
    if (m <= 1) {
      next_u64();
      return 0;
    }
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % m + 1) % m;
    for (;;) {
      const std::uint64_t x = next_u64();
      if (x <= limit) return x % m;
    }
  }

  /// Always consumes exactly one draw.
  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  std::uint64_t draws_ = 0;
};

}  // namespace wleach
