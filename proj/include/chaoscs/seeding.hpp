// SPDX-License-Identifier: Apache-2.0

#ifndef CHAOSCS_SEEDING_HPP
#define CHAOSCS_SEEDING_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace chaoscs {

/// Every random draw in the library goes through this engine. Substreams are
/// obtained by seeding fresh engines with derive_seed() rather than by
/// sharing one engine, so results never depend on scheduling order.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer (Steele, Lea, Flood 2014). Bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Folds a master seed and a path of indices into one substream seed:
/// h <- mix64(h ^ mix64(part)) for each part in order.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = mix64(master);
  for (std::uint64_t part : path) h = mix64(h ^ mix64(part));
  return h;
}

// Stream labels keep the matrix, signal and perturbation draws of one trial
// apart even when they share indices.
enum class Stream : std::uint64_t { kMatrix = 1, kSignal = 2, kInitialState = 3 };

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace chaoscs

#endif  // CHAOSCS_SEEDING_HPP
