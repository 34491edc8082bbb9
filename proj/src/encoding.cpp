#include "gmmk/encoding.hpp"

#include <limits>

#include "gmmk/error.hpp"
#include "gmmk/parallel.hpp"

namespace gmmk {

namespace {

void check_bits(unsigned b) {
  if (b < 1 || b > kMaxBits) throw UsageError("b must be in [1, 32]");
}

}  // namespace

EncodedFeatures encode(const HashSketch& s, unsigned b) {
  check_bits(b);
  const std::uint64_t block = std::uint64_t{1} << b;
  const std::uint64_t mask = block - 1;
  EncodedFeatures f{b, s.k, s.seed, s.p, s.dim, {}};
  f.positions.reserve(s.samples.size());
  for (std::size_t j = 0; j < s.samples.size(); ++j) {
    const std::uint64_t low = std::uint64_t{s.samples[j].i_star} & mask;
    f.positions.push_back(j * block + low + 1);
  }
  return f;
}

double dot_estimate(const EncodedFeatures& fu, const EncodedFeatures& fv) {
  if (fu.b != fv.b || fu.k != fv.k || fu.positions.size() != fv.positions.size()) {
    throw DataError("encoded feature shape mismatch");
  }
  if (fu.seed != fv.seed || fu.p != fv.p || fu.dim != fv.dim) {
    throw DataError("encoded feature provenance mismatch");
  }
  // One position per block, so agreement is blockwise.
  std::size_t shared = 0;
  for (std::size_t j = 0; j < fu.positions.size(); ++j) {
    if (fu.positions[j] == fv.positions[j]) ++shared;
  }
  return static_cast<double>(shared) / static_cast<double>(fu.k);
}

LabeledDataset encode_dataset(const LabeledDataset& ds, const EncodeOptions& options) {
  check_bits(options.b);
  if (options.k == 0) throw UsageError("k must be positive");
  if (!(options.p > 0.0)) throw UsageError("p must be positive");
  const std::uint64_t length = (std::uint64_t{1} << options.b) * options.k;
  if (length > std::numeric_limits<std::uint32_t>::max()) {
    throw UsageError("2^b * k exceeds the sparse format's index range");
  }
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (ds[r].vector.empty()) {
      throw DataError("record " + std::to_string(r + 1) + " is all zero and cannot be hashed");
    }
  }

  std::vector<LabeledRecord> out(ds.size());
  parallel_for(ds.size(), options.threads, [&](std::size_t r) {
    const auto f = encode(sketch(transform(ds[r].vector), options.p, options.seed, options.k),
                          options.b);
    std::vector<Entry> entries;
    entries.reserve(f.positions.size());
    for (auto pos : f.positions) entries.push_back({static_cast<std::uint32_t>(pos), 1.0});
    out[r] = {ds[r].label, SparseVector(length, std::move(entries))};
  });
  return LabeledDataset(length, std::move(out));
}

}  // namespace gmmk
