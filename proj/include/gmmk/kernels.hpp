#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gmmk/vectors.hpp"

namespace gmmk {

enum class KernelFamily { linear, rbf, gmm, egmm, pgmm, ggmm, pggmm, epgmm, eggmm, epggmm };

std::string_view family_name(KernelFamily family);
// Accepts the lowercase names printed by family_name; throws UsageError.
KernelFamily parse_family(std::string_view name);

// True for the eight min-max based families.
bool is_gmm_family(KernelFamily family);
bool uses_lambda(KernelFamily family);
bool uses_power(KernelFamily family);
bool uses_gamma(KernelFamily family);

// Kernel family plus exactly the parameters it needs.
class KernelSpec {
 public:
  // Throws UsageError if a required parameter is missing, a parameter the
  // family does not use is supplied, or any parameter is not > 0.
  KernelSpec(KernelFamily family, std::optional<double> lambda_e = std::nullopt,
             std::optional<double> p = std::nullopt,
             std::optional<double> gamma = std::nullopt);

  static KernelSpec linear() { return KernelSpec(KernelFamily::linear); }
  static KernelSpec rbf(double lambda_e) { return KernelSpec(KernelFamily::rbf, lambda_e); }
  static KernelSpec gmm() { return KernelSpec(KernelFamily::gmm); }
  static KernelSpec egmm(double lambda_e) { return KernelSpec(KernelFamily::egmm, lambda_e); }
  static KernelSpec pgmm(double p) { return KernelSpec(KernelFamily::pgmm, std::nullopt, p); }
  static KernelSpec ggmm(double gamma) {
    return KernelSpec(KernelFamily::ggmm, std::nullopt, std::nullopt, gamma);
  }
  static KernelSpec pggmm(double p, double gamma) {
    return KernelSpec(KernelFamily::pggmm, std::nullopt, p, gamma);
  }
  static KernelSpec epgmm(double lambda_e, double p) {
    return KernelSpec(KernelFamily::epgmm, lambda_e, p);
  }
  static KernelSpec eggmm(double lambda_e, double gamma) {
    return KernelSpec(KernelFamily::eggmm, lambda_e, std::nullopt, gamma);
  }
  static KernelSpec epggmm(double lambda_e, double p, double gamma) {
    return KernelSpec(KernelFamily::epggmm, lambda_e, p, gamma);
  }

  KernelFamily family() const noexcept { return family_; }
  std::optional<double> lambda_e() const noexcept { return lambda_e_; }
  std::optional<double> p() const noexcept { return p_; }
  std::optional<double> gamma() const noexcept { return gamma_; }

  // e.g. "pggmm p=0.5 gamma=2"
  std::string describe() const;

 private:
  KernelFamily family_;
  std::optional<double> lambda_e_;
  std::optional<double> p_;
  std::optional<double> gamma_;
};

// Above this power, pGMM sums are accumulated in log space.
inline constexpr double kLogSpacePowerThreshold = 30.0;

// Sum of mins over sum of maxes, by a merge of the two sorted entry lists.
// Throws DataError on dimension mismatch and NumericError if both are empty.
double gmm(const TransformedVector& a, const TransformedVector& b);

// Same ratio with every min and max raised to the power p.
double pgmm(const TransformedVector& a, const TransformedVector& b, double p);

double cosine(const SparseVector& a, const SparseVector& b);
double dot(const SparseVector& a, const SparseVector& b);

// GMM families only; LINEAR and RBF need the raw vectors.
double evaluate(const KernelSpec& spec, const TransformedVector& a, const TransformedVector& b);

// Any family; GMM families transform the inputs first.
double evaluate(const KernelSpec& spec, const SparseVector& a, const SparseVector& b);

struct GramMatrix {
  std::size_t n = 0;
  std::vector<double> values;  // row-major n x n
  KernelSpec spec = KernelSpec::gmm();
  std::vector<int> labels;

  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

struct GramOptions {
  std::size_t block_rows = 64;
  unsigned threads = 1;
};

// Each unordered pair is evaluated once and mirrored, so the result is
// exactly symmetric and identical for every thread count.
GramMatrix gram(const LabeledDataset& ds, const KernelSpec& spec, const GramOptions& options = {});

// Precomputed-kernel rows: "<label> 0:<i> 1:<K(i,1)> ... n:<K(i,n)>".
std::string write_precomputed(const GramMatrix& g);

// Renders a kernel value with 17 significant digits, keeping trailing zeros.
std::string format_kernel_value(double value);

}  // namespace gmmk
