#pragma once

#include <cstddef>
#include <cstdint>

#include "gmmk/vectors.hpp"

namespace gmmk {

// Signed data with nonlinear class structure: many random sign/magnitude
// prototypes, each owned by one class, more prototypes than dimensions so
// the classes are not linearly separable. A record copies a prototype's
// coordinates with sign flips, magnitude jitter and dropped entries.
struct SyntheticOptions {
  std::uint64_t seed = 1;
  std::size_t records = 2000;
  std::size_t dim = 50;
  int classes = 2;
  std::size_t prototypes = 128;
  double flip_probability = 0.1;
  double drop_probability = 0.2;
  double jitter = 0.3;  // log-normal sigma on magnitudes
};

// Prototypes depend only on (seed, dim, classes, prototypes); `stream`
// selects an independent draw of records from them, so train and test sets
// share structure but not records.
LabeledDataset make_synthetic(const SyntheticOptions& options, std::uint64_t stream);

}  // namespace gmmk
