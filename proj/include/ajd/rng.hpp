#pragma once

#include <cmath>
#include <cstdint>

namespace ajd {

// Fixed, platform-independent random stream so that every simulation is
// reproducible bit-for-bit from its seed alone:
//
//   * mix64           — the splitmix64 finalizer (Steele, Lea, Flood 2014).
//   * trial_seed      — per-trial sub-seed: mix64(master + (index+1) * golden).
//   * Rng             — xoshiro256++ (Blackman, Vigna 2019), state expanded
//                       from the seed with splitmix64 steps.
//   * next_unit       — 53-bit uniform in [0, 1).
//   * next_gaussian   — Box-Muller, consuming exactly two uniforms per draw
//                       (no caching, no platform library distributions).

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  return mix64(master_seed + (trial_index + 1) * 0x9E3779B97F4A7C15ULL);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    // splitmix64 state expansion
    std::uint64_t x = seed;
    for (auto& word : s_) {
      x += 0x9E3779B97F4A7C15ULL;
      std::uint64_t z = x;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal draw; consumes exactly two uniforms.
  double next_gaussian() {
    const double u1 = 1.0 - next_unit();  // in (0, 1], keeps the log finite
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

}  // namespace ajd
