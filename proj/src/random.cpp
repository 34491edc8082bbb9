#include "gmmk/random.hpp"

#include <cmath>

namespace gmmk {

CwsRandoms derive_randoms_from_key(std::uint64_t key, std::uint64_t slot) {
  const std::uint64_t base = slot * kDrawsPerSlot;
  const double u0 = open_unit(draw_word(key, base + 0));
  const double u1 = open_unit(draw_word(key, base + 1));
  const double u2 = open_unit(draw_word(key, base + 2));
  const double u3 = open_unit(draw_word(key, base + 3));
  const double u4 = open_unit(draw_word(key, base + 4));
  // Gamma(2, 1) is the sum of two unit exponentials.
  return {-std::log(u0) - std::log(u1), -std::log(u2) - std::log(u3), u4};
}

CwsRandoms derive_randoms(std::uint64_t seed, std::uint64_t j, std::uint64_t i,
                          std::uint64_t slot) {
  return derive_randoms_from_key(coordinate_key(hash_key(seed, j), i), slot);
}

}  // namespace gmmk
