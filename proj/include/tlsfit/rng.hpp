// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace tlsfit {

/// Single-step SplitMix64 mixing of a 64-bit value (Steele/Lea/Burke 2014).
/// Used both as the generator transition and to derive independent stream
/// seeds from structured inputs (master seed, model index, run index, ...).
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Combine an existing seed with one more 64-bit component.
constexpr std::uint64_t seed_combine(std::uint64_t seed, std::uint64_t part) noexcept {
  return splitmix64(seed ^ (part + 0x9e3779b97f4a7c15ull + (seed << 6) + (seed >> 2)));
}

/// Counter-based SplitMix64 stream. Deterministic across platforms and
/// compilers; every simulated trace owns one, derived from its seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : state_(splitmix64(seed)) {}

  std::uint64_t next_u64() noexcept {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double u01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; second value of each pair is cached.
  double gauss() noexcept {
    if (has_cache_) {
      has_cache_ = false;
      return cache_;
    }
    const double u1 = 1.0 - u01();  // (0, 1], keeps log finite
    const double u2 = u01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cache_ = r * std::sin(a);
    has_cache_ = true;
    return r * std::cos(a);
  }

  /// Independent sub-stream for the given index.
  Rng split(std::uint64_t stream) const noexcept {
    return Rng(seed_combine(state_, stream));
  }

 private:
  std::uint64_t state_;
  double cache_ = 0.0;
  bool has_cache_ = false;
};

}  // namespace tlsfit
