#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gmmk/gcws.hpp"
#include "gmmk/vectors.hpp"

namespace gmmk {

inline constexpr unsigned kMaxBits = 32;

// k-sparse binary vector of length 2^b * k: hash j contributes a single one
// inside block j, at offset (i* mod 2^b). t* is not used.
struct EncodedFeatures {
  unsigned b = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  double p = 1.0;
  std::size_t dim = 0;                  // transformed dimension of the sketch
  std::vector<std::uint64_t> positions;  // 1-based, one per hash, ascending

  std::uint64_t length() const { return (std::uint64_t{1} << b) * k; }

  friend bool operator==(const EncodedFeatures&, const EncodedFeatures&) = default;
};

// Position for hash j (1-based) is (j-1)*2^b + (i* mod 2^b) + 1, with i* taken
// 1-based. Throws UsageError unless 1 <= b <= 32.
EncodedFeatures encode(const HashSketch& s, unsigned b);

// Shared ones divided by k. Throws DataError on a shape or provenance mismatch.
double dot_estimate(const EncodedFeatures& fu, const EncodedFeatures& fv);

struct EncodeOptions {
  double p = 1.0;
  std::uint64_t seed = 0;
  std::size_t k = 0;
  unsigned b = 8;
  unsigned threads = 1;
};

// transform -> sketch -> encode for every record; labels are kept and the
// result has dimension 2^b * k with every value 1. An all-zero record is a
// DataError naming its 1-based record number.
LabeledDataset encode_dataset(const LabeledDataset& ds, const EncodeOptions& options);

}  // namespace gmmk
