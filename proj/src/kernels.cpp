#include "gmmk/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "gmmk/error.hpp"
#include "gmmk/parallel.hpp"

namespace gmmk {

namespace {

struct FamilyInfo {
  KernelFamily family;
  std::string_view name;
  bool lambda, power, gamma;
};

constexpr std::array<FamilyInfo, 10> kFamilies{{
    {KernelFamily::linear, "linear", false, false, false},
    {KernelFamily::rbf, "rbf", true, false, false},
    {KernelFamily::gmm, "gmm", false, false, false},
    {KernelFamily::egmm, "egmm", true, false, false},
    {KernelFamily::pgmm, "pgmm", false, true, false},
    {KernelFamily::ggmm, "ggmm", false, false, true},
    {KernelFamily::pggmm, "pggmm", false, true, true},
    {KernelFamily::epgmm, "epgmm", true, true, false},
    {KernelFamily::eggmm, "eggmm", true, false, true},
    {KernelFamily::epggmm, "epggmm", true, true, true},
}};

const FamilyInfo& info(KernelFamily family) {
  return kFamilies[static_cast<std::size_t>(family)];
}

void check_param(std::string_view family, const char* name, bool wanted,
                 const std::optional<double>& value) {
  if (wanted && !value) {
    throw UsageError(std::string(family) + " kernel requires --" + name);
  }
  if (!wanted && value) {
    throw UsageError(std::string(family) + " kernel does not take --" + name);
  }
  if (value && !(*value > 0.0 && std::isfinite(*value))) {
    throw UsageError(std::string("--") + name + " must be a positive finite number");
  }
}

void check_dims(std::size_t a, std::size_t b) {
  if (a != b) {
    throw DataError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

// Visits every coordinate present in a or b as (min, max); min is 0 where
// only one side is present.
template <typename Visit>
void merge(std::span<const Entry> a, std::span<const Entry> b, Visit&& visit) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].index == b[j].index) {
      const double x = a[i].value, y = b[j].value;
      visit(std::min(x, y), std::max(x, y));
      ++i;
      ++j;
    } else if (a[i].index < b[j].index) {
      visit(0.0, a[i++].value);
    } else {
      visit(0.0, b[j++].value);
    }
  }
  for (; i < a.size(); ++i) visit(0.0, a[i].value);
  for (; j < b.size(); ++j) visit(0.0, b[j].value);
}

void check_pair(const TransformedVector& a, const TransformedVector& b) {
  check_dims(a.dim(), b.dim());
  if (a.empty() && b.empty()) {
    throw NumericError("min-max kernel undefined for two all-zero vectors");
  }
}

double exp_warp(double lambda_e, double similarity) {
  return std::exp(-lambda_e * (1.0 - similarity));
}

}  // namespace

std::string_view family_name(KernelFamily family) { return info(family).name; }

KernelFamily parse_family(std::string_view name) {
  for (const auto& f : kFamilies) {
    if (f.name == name) return f.family;
  }
  throw UsageError("unknown kernel '" + std::string(name) + "'");
}

bool is_gmm_family(KernelFamily family) {
  return family != KernelFamily::linear && family != KernelFamily::rbf;
}
bool uses_lambda(KernelFamily family) { return info(family).lambda; }
bool uses_power(KernelFamily family) { return info(family).power; }
bool uses_gamma(KernelFamily family) { return info(family).gamma; }

KernelSpec::KernelSpec(KernelFamily family, std::optional<double> lambda_e,
                       std::optional<double> p, std::optional<double> gamma)
    : family_(family), lambda_e_(lambda_e), p_(p), gamma_(gamma) {
  const auto& f = info(family);
  check_param(f.name, "lambda-e", f.lambda, lambda_e_);
  check_param(f.name, "p", f.power, p_);
  check_param(f.name, "gamma", f.gamma, gamma_);
}

std::string KernelSpec::describe() const {
  std::string out(family_name(family_));
  if (lambda_e_) out += " lambda_e=" + format_shortest(*lambda_e_);
  if (p_) out += " p=" + format_shortest(*p_);
  if (gamma_) out += " gamma=" + format_shortest(*gamma_);
  return out;
}

double gmm(const TransformedVector& a, const TransformedVector& b) {
  check_pair(a, b);
  double sum_min = 0.0, sum_max = 0.0;
  merge(a.entries(), b.entries(), [&](double lo, double hi) {
    sum_min += lo;
    sum_max += hi;
  });
  return sum_min / sum_max;
}

double pgmm(const TransformedVector& a, const TransformedVector& b, double p) {
  if (!(p > 0.0)) throw UsageError("p must be positive");
  if (p == 1.0) return gmm(a, b);
  check_pair(a, b);

  if (p <= kLogSpacePowerThreshold) {
    double sum_min = 0.0, sum_max = 0.0;
    merge(a.entries(), b.entries(), [&](double lo, double hi) {
      if (lo > 0.0) sum_min += std::pow(lo, p);
      sum_max += std::pow(hi, p);
    });
    return sum_min / sum_max;
  }

  // x^p overflows for large p; shift every p*ln(x) by the largest one.
  double shift = -INFINITY;
  merge(a.entries(), b.entries(),
        [&](double, double hi) { shift = std::max(shift, p * std::log(hi)); });
  double sum_min = 0.0, sum_max = 0.0;
  merge(a.entries(), b.entries(), [&](double lo, double hi) {
    if (lo > 0.0) sum_min += std::exp(p * std::log(lo) - shift);
    sum_max += std::exp(p * std::log(hi) - shift);
  });
  return sum_min / sum_max;
}

double dot(const SparseVector& a, const SparseVector& b) {
  check_dims(a.dim(), b.dim());
  const auto ea = a.entries(), eb = b.entries();
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].index == eb[j].index) {
      sum += ea[i++].value * eb[j++].value;
    } else if (ea[i].index < eb[j].index) {
      ++i;
    } else {
      ++j;
    }
  }
  return sum;
}

double cosine(const SparseVector& a, const SparseVector& b) {
  const double ab = dot(a, b);
  const double aa = dot(a, a), bb = dot(b, b);
  if (aa == 0.0 || bb == 0.0) throw NumericError("cosine undefined for a zero-norm vector");
  return std::clamp(ab / std::sqrt(aa * bb), -1.0, 1.0);
}

double evaluate(const KernelSpec& spec, const TransformedVector& a, const TransformedVector& b) {
  switch (spec.family()) {
    case KernelFamily::gmm:
      return gmm(a, b);
    case KernelFamily::egmm:
      return exp_warp(*spec.lambda_e(), gmm(a, b));
    case KernelFamily::pgmm:
      return pgmm(a, b, *spec.p());
    case KernelFamily::ggmm:
      return std::pow(gmm(a, b), *spec.gamma());
    case KernelFamily::pggmm:
      return std::pow(pgmm(a, b, *spec.p()), *spec.gamma());
    case KernelFamily::epgmm:
      return exp_warp(*spec.lambda_e(), pgmm(a, b, *spec.p()));
    case KernelFamily::eggmm:
      return exp_warp(*spec.lambda_e(), std::pow(gmm(a, b), *spec.gamma()));
    case KernelFamily::epggmm:
      return exp_warp(*spec.lambda_e(), std::pow(pgmm(a, b, *spec.p()), *spec.gamma()));
    case KernelFamily::linear:
    case KernelFamily::rbf:
      break;
  }
  throw UsageError(std::string(family_name(spec.family())) +
                   " kernel is defined on the original vectors, not transformed ones");
}

double evaluate(const KernelSpec& spec, const SparseVector& a, const SparseVector& b) {
  switch (spec.family()) {
    case KernelFamily::linear:
      return dot(a, b);
    case KernelFamily::rbf:
      return exp_warp(*spec.lambda_e(), cosine(a, b));
    default:
      check_dims(a.dim(), b.dim());
      return evaluate(spec, transform(a), transform(b));
  }
}

GramMatrix gram(const LabeledDataset& ds, const KernelSpec& spec, const GramOptions& options) {
  const std::size_t n = ds.size();
  const std::size_t block = std::max<std::size_t>(1, options.block_rows);
  const std::size_t num_blocks = (n + block - 1) / block;

  GramMatrix g{n, std::vector<double>(n * n, 0.0), spec, ds.labels()};

  std::vector<TransformedVector> transformed;
  const bool min_max = is_gmm_family(spec.family());
  if (min_max) {
    transformed.resize(n);
    parallel_for(n, options.threads, [&](std::size_t r) { transformed[r] = transform(ds[r].vector); });
  }

  // Block b owns rows [b*block, ...) at and right of the diagonal plus their
  // mirror images below it; no two blocks write the same cell.
  parallel_for(num_blocks, options.threads, [&](std::size_t b) {
    const std::size_t lo = b * block, hi = std::min(n, lo + block);
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        const double v = min_max ? evaluate(spec, transformed[i], transformed[j])
                                 : evaluate(spec, ds[i].vector, ds[j].vector);
        g.values[i * n + j] = v;
        g.values[j * n + i] = v;
      }
    }
  });
  return g;
}

std::string format_kernel_value(double value) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%#.17g", value);
  return buf;
}

std::string write_precomputed(const GramMatrix& g) {
  std::string out;
  for (std::size_t i = 0; i < g.n; ++i) {
    out += std::to_string(g.labels[i]);
    out += " 0:";
    out += std::to_string(i + 1);
    for (std::size_t j = 0; j < g.n; ++j) {
      out += ' ';
      out += std::to_string(j + 1);
      out += ':';
      out += format_kernel_value(g(i, j));
    }
    out += '\n';
  }
  return out;
}

}  // namespace gmmk
