#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ctails {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to whiten seed material.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic per-role seed derivation: every worker stream is a pure
// function of (master_seed, index, role).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 std::string_view role) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ index);
  for (char c : role) h = mix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
  return h;
}

// Unbiased draw from [0, n) by rejection; avoids the implementation-defined
// behavior of std::uniform_int_distribution.
inline std::uint64_t bounded(Rng& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline int coin_spin(Rng& rng) { return (rng() & 1) ? 1 : -1; }

}  // namespace ctails
