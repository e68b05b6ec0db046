#pragma once

#include <cstdint>
#include <random>

namespace pcd {

using Rng = std::mt19937_64;

/// Purpose labels for derived random streams. The numeric values are part of
/// the reproducibility contract: changing them changes every seeded result.
enum class StreamLabel : std::uint64_t {
  kFleetInit = 1,
  kMobility = 2,
  kPrimary = 3,
  kSensing = 4,
  kV2rGain = 5,
  kV2vGain = 6,
  kFormation = 7,
  kNoncoop = 8,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for (master seed, slot, purpose).
inline Rng derive_stream(std::uint64_t seed, std::uint64_t slot, StreamLabel label) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ (slot * 0xd1b54a32d192ed03ULL));
  h = splitmix64(h ^ static_cast<std::uint64_t>(label));
  std::seed_seq seq{static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

}  // namespace pcd
