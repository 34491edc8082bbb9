#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmmk/random.hpp"
#include "gmmk/vectors.hpp"

namespace gmmk {

// One consistent weighted sample: the selected coordinate (1-based, in the
// transformed 2D space) and its quantized log-weight.
struct HashSample {
  std::uint32_t i_star = 0;
  std::int64_t t_star = 0;

  friend bool operator==(const HashSample&, const HashSample&) = default;
};

// Sample j (1-based) of x under power p. Only stored coordinates compete:
// a zero weight has log 0 = -inf, which pushes its a_i to +inf. Ties in the
// argmin go to the smallest coordinate. Throws DataError for an empty x.
HashSample gcws_hash(const TransformedVector& x, double p, std::uint64_t seed, std::uint64_t j,
                     std::uint64_t slot = 0);

// k samples plus the provenance that makes two sketches comparable.
struct HashSketch {
  std::uint64_t seed = 0;
  double p = 1.0;
  std::size_t k = 0;
  std::size_t dim = 0;  // transformed dimension 2D
  std::vector<HashSample> samples;

  friend bool operator==(const HashSketch&, const HashSketch&) = default;
};

HashSketch sketch(const TransformedVector& x, double p, std::uint64_t seed, std::size_t k);

// k tuples of gamma independent p = 1 samples, stored tuple-major.
struct GammaSketch {
  std::uint64_t seed = 0;
  std::size_t gamma = 1;
  std::size_t k = 0;
  std::size_t dim = 0;
  std::vector<HashSample> samples;  // k * gamma

  std::span<const HashSample> tuple(std::size_t j) const {
    return std::span<const HashSample>(samples).subspan(j * gamma, gamma);
  }

  friend bool operator==(const GammaSketch&, const GammaSketch&) = default;
};

GammaSketch gamma_sketch(const TransformedVector& x, std::size_t gamma, std::uint64_t seed,
                         std::size_t k);

enum class MatchMode {
  exact_pair,  // (i*, t*) must agree; unbiased for pGMM
  index_only,  // i* alone; approximate
};

// Fraction of matching samples. Throws DataError unless seed, p, k, dim agree.
double estimate_pgmm(const HashSketch& su, const HashSketch& sv, MatchMode mode);

// Fraction of tuples whose every replica matches on (i*, t*).
double estimate_ggmm(const GammaSketch& su, const GammaSketch& sv);

// Text persistence:
//   GCWS1 seed=<u64> p=<decimal> k=<int> dim=<int>      then k lines "<i*> <t*>"
//   GCWS1G seed=<u64> p=1 k=<int> dim=<int> gamma=<int> then k lines of gamma pairs
std::string write_sketch(const HashSketch& s);
std::string write_sketch(const GammaSketch& s);

// A file holds consecutive blocks of one kind.
std::vector<HashSketch> parse_hash_sketches(std::string_view text);
std::vector<GammaSketch> parse_gamma_sketches(std::string_view text);

// True when the first block header is GCWS1G.
bool is_gamma_sketch_text(std::string_view text);

}  // namespace gmmk
