#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

namespace dfo {

/// SplitMix64 finalizer (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Child seed for a named sub-stream. Stable across platforms and languages:
/// mix64(parent ^ mix64(fnv1a64(label))).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::string_view label) noexcept {
  return mix64(parent ^ mix64(fnv1a64(label)));
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept;

/// SplitMix64: a counter-based generator. The i-th output (0-based) is
/// mix64(seed + (i + 1) * 0x9E3779B97F4A7C15), so streams are fully defined by
/// the seed and can be reproduced in any language with 64-bit wrap-around
/// arithmetic. All sampling helpers below are specified bit-for-bit; nothing
/// goes through <random> distributions, whose output is library-defined.
class Rng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) noexcept;

  /// Uniform integer in [lo, hi] inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept;

  /// Standard normal via Box-Muller (one draw per pair of uniforms, the
  /// cosine branch; no cached second value so the stream stays stateless).
  double normal() noexcept;

  /// Fisher-Yates from the back: for i = n-1 .. 1 swap(v[i], v[below(i+1)]).
  template <typename T>
  void shuffle(std::span<T> values) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace dfo
