#pragma once

// Deterministic, platform-independent randomness: splitmix64 (a 64-bit mixing
// function applied to a counter) and a polar Box-Muller gaussian on top of a
// fixed 53-bit uniform mapping. Every draw is reproducible bit-for-bit from
// the seed alone; no implementation-defined standard-library distributions.

#include <cmath>
#include <cstdint>

namespace glx {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform on [0, 1): top 53 bits scaled by 2^-53.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // +1 or -1.
  double sign() { return (next_u64() & 1ull) ? 1.0 : -1.0; }

  // Standard normal via the polar (Marsaglia) transform; second deviate
  // cached. Deterministic given the draw sequence.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    have_spare_ = true;
    return u * scale;
  }

  // Independent substream: reseeds through the mixer so per-trial generators
  // are decorrelated regardless of scheduling order.
  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    SplitMix64 g(seed ^ (0xA0761D6478BD642Full * (index + 1)));
    g.next_u64();
    return g;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace glx
