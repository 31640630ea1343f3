#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <span>
#include <string_view>
#include <utility>

// Seeded, portable random number generation.
//
// Everything in this header is fully specified (no implementation-defined
// behavior), so plans, bootstrap draws, and synthetic histories can be
// reproduced bit-identically by independent implementations in any language.
// Generators: splitmix64 state update with the murmur-style finalizer.
// Bounded integers use the 128-bit multiply-shift reduction, normals use
// Box-Muller on 53-bit uniforms.

namespace benchgate {

/// splitmix64 finalizer; also used as a general 64-bit mixing function.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// FNV-1a over the bytes of a string, for tagging RNG streams.
constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Derives an independent stream seed from a base seed and a list of string
/// tags (e.g. {metric id, commit id}). Adding new tags elsewhere never
/// perturbs the stream derived for a fixed tag list.
inline std::uint64_t stream_seed(std::uint64_t base,
                                 std::initializer_list<std::string_view> tags) {
  std::uint64_t state = mix64(base + 0x9E3779B97F4A7C15ull);
  for (std::string_view t : tags) state = mix64(state ^ fnv1a64(t));
  return state;
}

/// Derives the seed of the index-th substream of a stream (one per bootstrap
/// sample, per instance run, ...), so parallel and serial evaluation agree.
constexpr std::uint64_t substream(std::uint64_t stream, std::uint64_t index) {
  return mix64(stream + (index + 1) * 0x9E3779B97F4A7C15ull);
}

/// splitmix64. Satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ull; }

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  constexpr result_type operator()() { return next(); }

  /// Uniform integer in [0, n). n must be nonzero.
  /// 128-bit multiply-shift reduction; bias is at most n / 2^64.
  constexpr std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  constexpr double next_double() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (cosine branch, two uniforms per draw,
  /// nothing cached so the draw count is predictable).
  double next_normal() {
    // u1 in (0, 1] keeps the log finite.
    double u1 = static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    double u2 = next_double();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::uint64_t state_;
};

/// In-place Fisher-Yates shuffle, unbiased modulo bounded()'s 2^-64 bias.
/// Swaps run from the last index down to 1.
template <typename T>
void fisher_yates(std::span<T> items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.bounded(i));
    std::swap(items[i - 1], items[j]);
  }
}

}  // namespace benchgate
