#pragma once

#include <cstdint>

namespace storyeval {

/// SplitMix64 (Steele, Lea, Flood 2014). Every sample the engine draws comes
/// from this generator so that streams are reproducible bit-for-bit on any
/// platform and easy to re-derive in other languages.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n) by rejection; n > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t state_;
};

/// Per-item stream seed: global seed XOR item index.
constexpr std::uint64_t derive_seed(std::uint64_t global, std::uint64_t index) {
  return global ^ index;
}

}  // namespace storyeval
