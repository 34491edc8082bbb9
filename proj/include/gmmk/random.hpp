#pragma once

#include <cstdint>

namespace gmmk {

// Counter-based random stream, version 1.
//
// Every variate is a pure function of (seed, hash index j, coordinate i,
// draw number). Keys are chained through the splitmix64 finalizer:
//
//   k0 = mix(seed ^ 0x9e3779b97f4a7c15)
//   k1 = mix(k0 + j * 0xd1b54a32d192ed03)
//   k2 = mix(k1 + i * 0xabc98388fb8fac03)
//   w  = mix(k2 + draw * 0x8cb92ba72f3d8dd7)
//
// and a word w becomes ((w >> 12) + 0.5) * 2^-52, a uniform in (0, 1) that is
// never exactly 0 or 1. Persisted sketches depend on these constants; any
// change must bump kRandomStreamVersion and the sketch header tag.
inline constexpr int kRandomStreamVersion = 1;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_key(std::uint64_t seed, std::uint64_t j) noexcept {
  return mix64(mix64(seed ^ 0x9e3779b97f4a7c15ULL) + j * 0xd1b54a32d192ed03ULL);
}

constexpr std::uint64_t coordinate_key(std::uint64_t hash_key, std::uint64_t i) noexcept {
  return mix64(hash_key + i * 0xabc98388fb8fac03ULL);
}

constexpr std::uint64_t draw_word(std::uint64_t coordinate_key, std::uint64_t draw) noexcept {
  return mix64(coordinate_key + draw * 0x8cb92ba72f3d8dd7ULL);
}

constexpr double open_unit(std::uint64_t word) noexcept {
  return (static_cast<double>(word >> 12) + 0.5) * 0x1.0p-52;
}

// Variates of one (hash, coordinate) cell: r, c ~ Gamma(2, 1), beta ~ U(0, 1).
struct CwsRandoms {
  double r;
  double c;
  double beta;
};

// Draws consumed per slot: two uniforms each for r and c, one for beta.
inline constexpr std::uint64_t kDrawsPerSlot = 5;

// slot separates independent replicas of the same (j, i) cell.
CwsRandoms derive_randoms(std::uint64_t seed, std::uint64_t j, std::uint64_t i,
                          std::uint64_t slot = 0);

// Same, from a precomputed coordinate_key(hash_key(seed, j), i).
CwsRandoms derive_randoms_from_key(std::uint64_t coordinate_key, std::uint64_t slot);

}  // namespace gmmk
