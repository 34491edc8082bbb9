#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gmmk {

// One stored coordinate. Indices are 1-based everywhere.
struct Entry {
  std::uint32_t index;
  double value;

  friend bool operator==(const Entry&, const Entry&) = default;
};

// Sparse real vector of dimension dim. Entries are sorted by strictly
// increasing index in [1, dim]; stored values are finite and nonzero.
class SparseVector {
 public:
  SparseVector() = default;

  // Validates the invariants and throws DataError on violation.
  SparseVector(std::size_t dim, std::vector<Entry> entries);

  // Builds from a dense array, dropping zeros.
  static SparseVector from_dense(std::span<const double> dense);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::span<const Entry> entries() const noexcept { return entries_; }

  std::vector<double> to_dense() const;
  SparseVector scaled(double factor) const;
  // Same entries in a larger ambient dimension.
  SparseVector with_dim(std::size_t dim) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

// Image of a signed vector under the positive/negative split: dimension 2D,
// every stored value strictly positive, and for each original coordinate i at
// most one of 2i-1 (positive part) and 2i (negative part) is present.
class TransformedVector {
 public:
  TransformedVector() = default;

  // Validates sorted indices in [1, dim] and strictly positive finite values.
  TransformedVector(std::size_t dim, std::vector<Entry> entries);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t nnz() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::span<const Entry> entries() const noexcept { return entries_; }

  std::vector<double> to_dense() const;
  // Elementwise power of every stored value.
  TransformedVector powered(double p) const;

  friend bool operator==(const TransformedVector&, const TransformedVector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Entry> entries_;
};

TransformedVector transform(const SparseVector& u);

struct LabeledRecord {
  int label = 0;
  SparseVector vector;

  friend bool operator==(const LabeledRecord&, const LabeledRecord&) = default;
};

// Non-empty list of labeled records sharing one dimension.
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(std::size_t dim, std::vector<LabeledRecord> records);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return records_.size(); }
  const LabeledRecord& operator[](std::size_t i) const { return records_[i]; }
  std::span<const LabeledRecord> records() const noexcept { return records_; }
  std::vector<int> labels() const;

  friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<LabeledRecord> records_;
};

struct ParseOptions {
  // Pins the dimension; must be at least the largest index seen.
  std::optional<std::size_t> dim;
  // Skip blank lines and lines starting with '#'.
  bool lenient = false;
};

// Parses "<label> <idx>:<val> ..." lines. Errors carry the 1-based line number.
LabeledDataset parse_dataset(std::string_view text, const ParseOptions& options = {});
LabeledDataset read_dataset_file(const std::string& path, const ParseOptions& options = {});

std::string write_dataset(const LabeledDataset& ds);
void write_dataset_file(const std::string& path, const LabeledDataset& ds);

// Renders a double with 17 significant digits, trailing zeros trimmed.
std::string format_real(double value);
// Shortest representation that parses back to the same double.
std::string format_shortest(double value);

}  // namespace gmmk
