#include "gmmk/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "gmmk/error.hpp"
#include "gmmk/random.hpp"

namespace gmmk {

namespace {

// Sequential generator over the counter-based stream.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  double uniform() { return open_unit(draw_word(key_, counter_++)); }

  double normal() {
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::size_t below(std::size_t n) {
    return static_cast<std::size_t>(draw_word(key_, counter_++) % n);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct Prototype {
  int label;
  std::vector<double> values;
};

}  // namespace

LabeledDataset make_synthetic(const SyntheticOptions& options, std::uint64_t stream) {
  if (options.records == 0 || options.dim == 0 || options.classes < 2 ||
      options.prototypes < static_cast<std::size_t>(options.classes)) {
    throw UsageError("synthetic: need records, dim > 0, classes >= 2, prototypes >= classes");
  }

  Stream proto_rng(hash_key(options.seed, 0));
  std::vector<Prototype> prototypes(options.prototypes);
  for (std::size_t m = 0; m < prototypes.size(); ++m) {
    prototypes[m].label = static_cast<int>(m % static_cast<std::size_t>(options.classes));
    prototypes[m].values.resize(options.dim);
    for (auto& v : prototypes[m].values) {
      const double sign = proto_rng.uniform() < 0.5 ? -1.0 : 1.0;
      v = sign * std::exp(proto_rng.normal());
    }
  }

  Stream rng(hash_key(options.seed, stream + 1));
  std::vector<LabeledRecord> records;
  records.reserve(options.records);
  while (records.size() < options.records) {
    const auto& proto = prototypes[rng.below(prototypes.size())];
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < options.dim; ++i) {
      const bool drop = rng.uniform() < options.drop_probability;
      const bool flip = rng.uniform() < options.flip_probability;
      const double jitter = std::exp(options.jitter * rng.normal());
      if (drop) continue;
      const double v = proto.values[i] * jitter * (flip ? -1.0 : 1.0);
      entries.push_back({static_cast<std::uint32_t>(i + 1), v});
    }
    if (entries.empty()) continue;
    records.push_back({proto.label, SparseVector(options.dim, std::move(entries))});
  }
  return LabeledDataset(options.dim, std::move(records));
}

}  // namespace gmmk
