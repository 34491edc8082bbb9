#include "gmmk/vectors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gmmk/error.hpp"

namespace gmmk {

namespace {

void check_sorted(std::size_t dim, std::span<const Entry> entries, const char* what) {
  std::uint32_t prev = 0;
  for (const auto& e : entries) {
    if (e.index == 0 || e.index > dim) {
      throw DataError(std::string(what) + ": index " + std::to_string(e.index) +
                      " outside [1, " + std::to_string(dim) + "]");
    }
    if (e.index <= prev) {
      throw DataError(std::string(what) + ": indices not strictly increasing at " +
                      std::to_string(e.index));
    }
    if (!std::isfinite(e.value)) {
      throw DataError(std::string(what) + ": non-finite value at index " +
                      std::to_string(e.index));
    }
    prev = e.index;
  }
}

bool is_blank(char c) { return c == ' ' || c == '\t'; }

std::string line_error(std::size_t line, const std::string& msg) {
  return "line " + std::to_string(line) + ": " + msg;
}

int parse_label(std::string_view tok, std::size_t line) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  int label = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), label);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
    throw DataError(line_error(line, "unparseable label '" + std::string(tok) + "'"));
  }
  return label;
}

}  // namespace

SparseVector::SparseVector(std::size_t dim, std::vector<Entry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  check_sorted(dim_, entries_, "sparse vector");
  for (const auto& e : entries_) {
    if (e.value == 0.0) {
      throw DataError("sparse vector: stored zero at index " + std::to_string(e.index));
    }
  }
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) entries.push_back({static_cast<std::uint32_t>(i + 1), dense[i]});
  }
  return SparseVector(dense.size(), std::move(entries));
}

std::vector<double> SparseVector::to_dense() const {
  std::vector<double> out(dim_, 0.0);
  for (const auto& e : entries_) out[e.index - 1] = e.value;
  return out;
}

SparseVector SparseVector::scaled(double factor) const {
  std::vector<Entry> out(entries_);
  for (auto& e : out) e.value *= factor;
  return SparseVector(dim_, std::move(out));
}

SparseVector SparseVector::with_dim(std::size_t dim) const {
  return SparseVector(dim, entries_);
}

TransformedVector::TransformedVector(std::size_t dim, std::vector<Entry> entries)
    : dim_(dim), entries_(std::move(entries)) {
  check_sorted(dim_, entries_, "transformed vector");
  for (const auto& e : entries_) {
    if (!(e.value > 0.0)) {
      throw DataError("transformed vector: nonpositive value at index " +
                      std::to_string(e.index));
    }
  }
}

std::vector<double> TransformedVector::to_dense() const {
  std::vector<double> out(dim_, 0.0);
  for (const auto& e : entries_) out[e.index - 1] = e.value;
  return out;
}

TransformedVector TransformedVector::powered(double p) const {
  std::vector<Entry> out(entries_);
  for (auto& e : out) e.value = std::pow(e.value, p);
  return TransformedVector(dim_, std::move(out));
}

TransformedVector transform(const SparseVector& u) {
  std::vector<Entry> out;
  out.reserve(u.nnz());
  for (const auto& e : u.entries()) {
    if (e.value > 0.0) {
      out.push_back({2 * e.index - 1, e.value});
    } else {
      out.push_back({2 * e.index, -e.value});
    }
  }
  return TransformedVector(2 * u.dim(), std::move(out));
}

LabeledDataset::LabeledDataset(std::size_t dim, std::vector<LabeledRecord> records)
    : dim_(dim), records_(std::move(records)) {
  if (records_.empty()) throw DataError("empty dataset");
  for (std::size_t r = 0; r < records_.size(); ++r) {
    if (records_[r].vector.dim() != dim_) {
      throw DataError("record " + std::to_string(r + 1) + ": dimension " +
                      std::to_string(records_[r].vector.dim()) + " != dataset dimension " +
                      std::to_string(dim_));
    }
  }
}

std::vector<int> LabeledDataset::labels() const {
  std::vector<int> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.label);
  return out;
}

LabeledDataset parse_dataset(std::string_view text, const ParseOptions& options) {
  struct Row {
    int label;
    std::vector<Entry> entries;
  };
  std::vector<Row> rows;
  std::size_t max_index = 0;
  std::size_t line_no = 0;

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    std::size_t first = 0;
    while (first < line.size() && is_blank(line[first])) ++first;
    if (first == line.size() || line[first] == '#') {
      if (options.lenient) continue;
      throw DataError(line_error(line_no, first == line.size() ? "blank line" : "comment line"));
    }

    // Tokenize on spaces and tabs.
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && is_blank(line[i])) ++i;
      std::size_t j = i;
      while (j < line.size() && !is_blank(line[j])) ++j;
      if (j > i) tokens.push_back(line.substr(i, j - i));
      i = j;
    }

    Row row{parse_label(tokens.front(), line_no), {}};
    std::uint32_t prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw DataError(line_error(line_no, "malformed feature '" + std::string(tok) + "'"));
      }
      std::uint32_t index = 0;
      auto [iptr, iec] = std::from_chars(tok.data(), tok.data() + colon, index);
      if (iec != std::errc() || iptr != tok.data() + colon || colon == 0) {
        throw DataError(line_error(line_no, "unparseable index in '" + std::string(tok) + "'"));
      }
      if (index == 0) throw DataError(line_error(line_no, "index 0 (indices are 1-based)"));
      if (index <= prev) throw DataError(line_error(line_no, "nonascending indices"));
      prev = index;

      double value = 0.0;
      const char* vbeg = tok.data() + colon + 1;
      const char* vend = tok.data() + tok.size();
      if (vbeg != vend && *vbeg == '+') ++vbeg;
      auto [vptr, vec] = std::from_chars(vbeg, vend, value);
      if (vec != std::errc() || vptr != vend || vbeg == vend || !std::isfinite(value)) {
        throw DataError(line_error(line_no, "unparseable value in '" + std::string(tok) + "'"));
      }
      max_index = std::max<std::size_t>(max_index, index);
      if (value != 0.0) row.entries.push_back({index, value});
    }
    rows.push_back(std::move(row));
  }

  if (rows.empty()) throw DataError("empty dataset");

  std::size_t dim = std::max<std::size_t>(max_index, 1);
  if (options.dim) {
    if (*options.dim < max_index) {
      throw DataError("dimension override " + std::to_string(*options.dim) +
                      " is below the largest index " + std::to_string(max_index));
    }
    dim = *options.dim;
  }

  std::vector<LabeledRecord> records;
  records.reserve(rows.size());
  for (auto& row : rows) {
    records.push_back({row.label, SparseVector(dim, std::move(row.entries))});
  }
  return LabeledDataset(dim, std::move(records));
}

LabeledDataset read_dataset_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), options);
}

std::string format_real(double value) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::string format_shortest(double value) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string write_dataset(const LabeledDataset& ds) {
  std::string out;
  for (const auto& rec : ds.records()) {
    out += std::to_string(rec.label);
    for (const auto& e : rec.vector.entries()) {
      out += ' ';
      out += std::to_string(e.index);
      out += ':';
      out += format_real(e.value);
    }
    out += '\n';
  }
  return out;
}

void write_dataset_file(const std::string& path, const LabeledDataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << write_dataset(ds);
}

}  // namespace gmmk
