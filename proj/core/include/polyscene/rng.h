// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <concepts>
#include <cstdint>
#include <random>

namespace polyscene {

/// SplitMix64 finalizer; used to derive independent sub-seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream backed by std::mt19937_64.
///
/// The raw 64-bit output of mt19937_64 is fixed by the C++ standard, and the
/// conversion to doubles below uses only integer arithmetic and exact scaling,
/// so a given seed produces the same samples on every conforming platform.
/// (std::uniform_real_distribution is deliberately not used: its algorithm is
/// implementation-defined.)
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Independent stream for sub-task `index` (attempt, view, ...).
  RngStream substream(std::uint64_t index) const {
    return RngStream(derive_seed(seed_, index));
  }

  static constexpr std::uint64_t derive_seed(std::uint64_t seed,
                                             std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ splitmix64(~index));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Anything that hands out uniform reals in [lo, hi). Tests plug in scripted
/// sources to pin the exact values a sampler sees.
template <typename T>
concept UniformSource = requires(T& t, double lo, double hi) {
  { t.uniform(lo, hi) } -> std::convertible_to<double>;
};

static_assert(UniformSource<RngStream>);

}  // namespace polyscene
