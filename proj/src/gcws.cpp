#include "gmmk/gcws.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <type_traits>

#include "gmmk/error.hpp"

namespace gmmk {

namespace {

std::int64_t to_int64_saturated(double v) {
  constexpr double lim = 9.2e18;
  if (v >= lim) return std::numeric_limits<std::int64_t>::max();
  if (v <= -lim) return std::numeric_limits<std::int64_t>::min();
  return static_cast<std::int64_t>(v);
}

void check_provenance(bool same, const char* what) {
  if (!same) throw DataError(std::string("sketch provenance mismatch: ") + what);
}

// Splits text into lines, dropping one trailing empty line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

template <typename T>
T parse_number(std::string_view tok, std::size_t line_no, const char* what) {
  T value{};
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(b, e, value);
  if (ec != std::errc() || ptr != e || b == e) {
    throw DataError("sketch line " + std::to_string(line_no) + ": bad " + what + " '" +
                    std::string(tok) + "'");
  }
  return value;
}

std::string_view field(std::string_view word, std::string_view key, std::size_t line_no) {
  if (word.size() <= key.size() || word.substr(0, key.size()) != key ||
      word[key.size()] != '=') {
    throw DataError("sketch line " + std::to_string(line_no) + ": expected " +
                    std::string(key) + "=..., got '" + std::string(word) + "'");
  }
  return word.substr(key.size() + 1);
}

struct Header {
  std::uint64_t seed;
  double p;
  std::size_t k;
  std::size_t dim;
  std::size_t gamma;
};

Header parse_header(std::string_view line, bool gamma, std::size_t line_no) {
  const auto words = split_words(line);
  const std::string_view tag = gamma ? "GCWS1G" : "GCWS1";
  const std::size_t expected = gamma ? 6 : 5;
  if (words.empty() || words[0] != tag || words.size() != expected) {
    throw DataError("sketch line " + std::to_string(line_no) + ": expected a " +
                    std::string(tag) + " header");
  }
  Header h{};
  h.seed = parse_number<std::uint64_t>(field(words[1], "seed", line_no), line_no, "seed");
  h.p = parse_number<double>(field(words[2], "p", line_no), line_no, "p");
  h.k = parse_number<std::size_t>(field(words[3], "k", line_no), line_no, "k");
  h.dim = parse_number<std::size_t>(field(words[4], "dim", line_no), line_no, "dim");
  h.gamma = gamma ? parse_number<std::size_t>(field(words[5], "gamma", line_no), line_no, "gamma")
                  : 1;
  if (!(h.p > 0.0) || h.k == 0 || h.gamma == 0) {
    throw DataError("sketch line " + std::to_string(line_no) + ": p, k and gamma must be positive");
  }
  if (gamma && h.p != 1.0) {
    throw DataError("sketch line " + std::to_string(line_no) + ": GCWS1G requires p=1");
  }
  return h;
}

// Reads `count` (i*, t*) pairs from one line.
void parse_pairs(std::string_view line, std::size_t count, std::size_t dim, std::size_t line_no,
                 std::vector<HashSample>& out) {
  const auto words = split_words(line);
  if (words.size() != 2 * count) {
    throw DataError("sketch line " + std::to_string(line_no) + ": expected " +
                    std::to_string(count) + " sample pair(s)");
  }
  for (std::size_t w = 0; w < words.size(); w += 2) {
    HashSample s;
    s.i_star = parse_number<std::uint32_t>(words[w], line_no, "i*");
    s.t_star = parse_number<std::int64_t>(words[w + 1], line_no, "t*");
    if (s.i_star == 0 || s.i_star > dim) {
      throw DataError("sketch line " + std::to_string(line_no) + ": i* outside [1, dim]");
    }
    out.push_back(s);
  }
}

template <typename Sketch>
std::vector<Sketch> parse_blocks(std::string_view text, bool gamma) {
  const auto lines = split_lines(text);
  std::vector<Sketch> out;
  std::size_t at = 0;
  while (at < lines.size()) {
    const Header h = parse_header(lines[at], gamma, at + 1);
    ++at;
    if (lines.size() - at < h.k) throw DataError("sketch block truncated");
    Sketch s;
    s.seed = h.seed;
    s.k = h.k;
    s.dim = h.dim;
    if constexpr (std::is_same_v<Sketch, HashSketch>) {
      s.p = h.p;
    } else {
      s.gamma = h.gamma;
    }
    s.samples.reserve(h.k * h.gamma);
    for (std::size_t j = 0; j < h.k; ++j, ++at) {
      parse_pairs(lines[at], h.gamma, h.dim, at + 1, s.samples);
    }
    out.push_back(std::move(s));
  }
  if (out.empty()) throw DataError("no sketch blocks found");
  return out;
}

}  // namespace

HashSample gcws_hash(const TransformedVector& x, double p, std::uint64_t seed, std::uint64_t j,
                     std::uint64_t slot) {
  if (x.empty()) throw DataError("cannot hash an all-zero vector");
  const std::uint64_t key_j = hash_key(seed, j);

  double best_a = std::numeric_limits<double>::infinity();
  double best_t = 0.0;
  std::uint32_t best_i = 0;
  for (const auto& e : x.entries()) {
    const CwsRandoms rnd = derive_randoms_from_key(coordinate_key(key_j, e.index), slot);
    const double t = std::floor(p * std::log(e.value) / rnd.r + rnd.beta);
    const double a = std::log(rnd.c) - rnd.r * (t + 1.0 - rnd.beta);
    // Strict comparison keeps the smallest index on ties.
    if (a < best_a) {
      best_a = a;
      best_t = t;
      best_i = e.index;
    }
  }
  return {best_i, to_int64_saturated(best_t)};
}

HashSketch sketch(const TransformedVector& x, double p, std::uint64_t seed, std::size_t k) {
  if (k == 0) throw UsageError("k must be positive");
  if (!(p > 0.0)) throw UsageError("p must be positive");
  HashSketch s{seed, p, k, x.dim(), {}};
  s.samples.reserve(k);
  for (std::size_t j = 1; j <= k; ++j) s.samples.push_back(gcws_hash(x, p, seed, j));
  return s;
}

GammaSketch gamma_sketch(const TransformedVector& x, std::size_t gamma, std::uint64_t seed,
                         std::size_t k) {
  if (k == 0) throw UsageError("k must be positive");
  if (gamma == 0) throw UsageError("gamma must be a positive integer");
  GammaSketch s{seed, gamma, k, x.dim(), {}};
  s.samples.reserve(k * gamma);
  for (std::size_t j = 1; j <= k; ++j) {
    for (std::size_t r = 0; r < gamma; ++r) s.samples.push_back(gcws_hash(x, 1.0, seed, j, r));
  }
  return s;
}

double estimate_pgmm(const HashSketch& su, const HashSketch& sv, MatchMode mode) {
  check_provenance(su.seed == sv.seed, "seed");
  check_provenance(su.p == sv.p, "p");
  check_provenance(su.k == sv.k && su.samples.size() == sv.samples.size(), "k");
  check_provenance(su.dim == sv.dim, "dim");
  std::size_t matches = 0;
  for (std::size_t j = 0; j < su.samples.size(); ++j) {
    const auto& a = su.samples[j];
    const auto& b = sv.samples[j];
    if (a.i_star == b.i_star && (mode == MatchMode::index_only || a.t_star == b.t_star)) {
      ++matches;
    }
  }
  return static_cast<double>(matches) / static_cast<double>(su.k);
}

double estimate_ggmm(const GammaSketch& su, const GammaSketch& sv) {
  check_provenance(su.seed == sv.seed, "seed");
  check_provenance(su.gamma == sv.gamma, "gamma");
  check_provenance(su.k == sv.k && su.samples.size() == sv.samples.size(), "k");
  check_provenance(su.dim == sv.dim, "dim");
  std::size_t matches = 0;
  for (std::size_t j = 0; j < su.k; ++j) {
    const auto a = su.tuple(j), b = sv.tuple(j);
    bool all = true;
    for (std::size_t r = 0; r < su.gamma && all; ++r) all = a[r] == b[r];
    if (all) ++matches;
  }
  return static_cast<double>(matches) / static_cast<double>(su.k);
}

std::string write_sketch(const HashSketch& s) {
  std::string out = "GCWS1 seed=" + std::to_string(s.seed) + " p=" + format_shortest(s.p) +
                    " k=" + std::to_string(s.k) + " dim=" + std::to_string(s.dim) + "\n";
  for (const auto& x : s.samples) {
    out += std::to_string(x.i_star) + ' ' + std::to_string(x.t_star) + '\n';
  }
  return out;
}

std::string write_sketch(const GammaSketch& s) {
  std::string out = "GCWS1G seed=" + std::to_string(s.seed) + " p=1 k=" + std::to_string(s.k) +
                    " dim=" + std::to_string(s.dim) + " gamma=" + std::to_string(s.gamma) + "\n";
  for (std::size_t j = 0; j < s.k; ++j) {
    const auto t = s.tuple(j);
    for (std::size_t r = 0; r < t.size(); ++r) {
      if (r) out += ' ';
      out += std::to_string(t[r].i_star) + ' ' + std::to_string(t[r].t_star);
    }
    out += '\n';
  }
  return out;
}

std::vector<HashSketch> parse_hash_sketches(std::string_view text) {
  return parse_blocks<HashSketch>(text, false);
}

std::vector<GammaSketch> parse_gamma_sketches(std::string_view text) {
  return parse_blocks<GammaSketch>(text, true);
}

bool is_gamma_sketch_text(std::string_view text) { return text.substr(0, 7) == "GCWS1G "; }

}  // namespace gmmk
