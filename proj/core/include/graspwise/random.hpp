#pragma once

#include <cstdint>
#include <random>

namespace graspwise {

using Rng = std::mt19937_64;

/// Derives an independent child seed from (seed, stream, index) with a
/// splitmix64 finalizer, so per-scene work can be seeded without a shared
/// generator and evaluated in any order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index = 0) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ stream) ^ index);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Named streams for derive_seed.
namespace streams {
inline constexpr std::uint64_t kDescribe = 1;
inline constexpr std::uint64_t kCorrupt = 2;
inline constexpr std::uint64_t kIntervene = 3;
inline constexpr std::uint64_t kGround = 4;
inline constexpr std::uint64_t kProposals = 5;
inline constexpr std::uint64_t kSampling = 6;
inline constexpr std::uint64_t kScoring = 7;
inline constexpr std::uint64_t kGraphNoise = 8;
inline constexpr std::uint64_t kScene = 9;
inline constexpr std::uint64_t kTemplate = 10;
inline constexpr std::uint64_t kStratify = 11;
}  // namespace streams

}  // namespace graspwise
