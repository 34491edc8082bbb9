#include "gmmk/linear.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "gmmk/error.hpp"
#include "gmmk/parallel.hpp"

namespace gmmk {

namespace {

constexpr int kMaxHalvings = 60;

// log(1 + exp(-z)) without overflow.
double log_loss(double z) {
  return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

// 1 / (1 + exp(z))
double sigmoid_neg(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

double sparse_dot(const SparseVector& x, std::span<const double> w) {
  double s = 0.0;
  for (const auto& e : x.entries()) s += e.value * w[e.index - 1];
  return s;
}

double objective_value(const LabeledDataset& ds, std::span<const double> targets,
                       std::span<const double> w, double b, double lambda) {
  double loss = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    loss += log_loss(targets[i] * (sparse_dot(ds[i].vector, w) + b));
  }
  double norm2 = 0.0;
  for (double v : w) norm2 += v * v;
  return 0.5 * lambda * norm2 + loss / static_cast<double>(ds.size());
}

struct ClassFit {
  std::vector<double> w;
  double b = 0.0;
  std::vector<double> loss;
};

ClassFit fit_class(const LabeledDataset& ds, std::span<const double> targets,
                   const TrainOptions& options) {
  const std::size_t n = ds.size();
  const double lambda = 1.0 / (options.C * static_cast<double>(n));

  double max_norm2 = 0.0;
  for (const auto& rec : ds.records()) {
    double s = 0.0;
    for (const auto& e : rec.vector.entries()) s += e.value * e.value;
    max_norm2 = std::max(max_norm2, s);
  }
  double step = 1.0 / (0.25 * (max_norm2 + 1.0) + lambda);

  ClassFit fit{std::vector<double>(ds.dim(), 0.0), 0.0, {}};
  auto current = logistic_objective(ds, targets, fit.w, fit.b, lambda);
  fit.loss.push_back(current.value);

  std::vector<double> trial(ds.dim());
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      for (std::size_t f = 0; f < trial.size(); ++f) trial[f] = fit.w[f] - step * current.grad_w[f];
      const double trial_b = fit.b - step * current.grad_b;
      const double value = objective_value(ds, targets, trial, trial_b, lambda);
      if (value <= current.value) {
        fit.w.swap(trial);
        fit.b = trial_b;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    current = logistic_objective(ds, targets, fit.w, fit.b, lambda);
    fit.loss.push_back(current.value);
    step *= 2.0;
  }
  return fit;
}

void check_dim(const LinearModel& m, std::size_t dim) {
  if (dim != m.dim) {
    throw DataError("feature dimension " + std::to_string(dim) + " does not match model dimension " +
                    std::to_string(m.dim));
  }
}

}  // namespace

ObjectiveValue logistic_objective(const LabeledDataset& ds, std::span<const double> targets,
                                  std::span<const double> w, double b, double lambda) {
  ObjectiveValue out;
  out.grad_w.assign(w.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(ds.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& x = ds[i].vector;
    const double margin = targets[i] * (sparse_dot(x, w) + b);
    loss += log_loss(margin);
    const double coef = -targets[i] * sigmoid_neg(margin) * inv_n;
    for (const auto& e : x.entries()) out.grad_w[e.index - 1] += coef * e.value;
    out.grad_b += coef;
  }
  double norm2 = 0.0;
  for (std::size_t f = 0; f < w.size(); ++f) {
    norm2 += w[f] * w[f];
    out.grad_w[f] += lambda * w[f];
  }
  out.value = 0.5 * lambda * norm2 + loss * inv_n;
  return out;
}

LinearModel train(const LabeledDataset& features, const TrainOptions& options, TrainTrace* trace) {
  if (!(options.C > 0.0)) throw UsageError("C must be positive");
  if (options.epochs == 0) throw UsageError("epochs must be positive");
  if (features.size() < 2) throw DataError("training needs at least two records");

  std::vector<int> classes = features.labels();
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  if (classes.size() < 2) throw DataError("training needs at least two classes");

  LinearModel m;
  m.classes = classes;
  m.dim = features.dim();
  m.C = options.C;
  m.weights.resize(classes.size());
  m.bias.resize(classes.size());
  std::vector<std::vector<double>> losses(classes.size());

  parallel_for(classes.size(), options.threads, [&](std::size_t c) {
    std::vector<double> targets(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
      targets[i] = features[i].label == classes[c] ? 1.0 : -1.0;
    }
    auto fit = fit_class(features, targets, options);
    m.weights[c] = std::move(fit.w);
    m.bias[c] = fit.b;
    losses[c] = std::move(fit.loss);
  });

  if (trace) trace->loss = std::move(losses);
  return m;
}

std::vector<double> class_scores(const LinearModel& m, const SparseVector& x) {
  check_dim(m, x.dim());
  std::vector<double> scores(m.num_classes());
  for (std::size_t c = 0; c < m.num_classes(); ++c) {
    scores[c] = sparse_dot(x, m.weights[c]) + m.bias[c];
  }
  return scores;
}

int predict(const LinearModel& m, const SparseVector& x) {
  const auto scores = class_scores(m, x);
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] > scores[best]) best = c;
  }
  return m.classes[best];
}

double evaluate_accuracy(const LinearModel& m, const LabeledDataset& ds) {
  check_dim(m, ds.dim());
  std::size_t correct = 0;
  for (const auto& rec : ds.records()) {
    if (predict(m, rec.vector) == rec.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.size());
}

std::string write_model(const LinearModel& m) {
  std::string out = "GMMK-LINEAR classes=" + std::to_string(m.num_classes()) +
                    " dim=" + std::to_string(m.dim) + " C=" + format_real(m.C) + "\n";
  for (std::size_t c = 0; c < m.num_classes(); ++c) {
    out += std::to_string(m.classes[c]) + ' ' + format_real(m.bias[c]);
    for (std::size_t f = 0; f < m.dim; ++f) {
      if (m.weights[c][f] != 0.0) {
        out += ' ' + std::to_string(f + 1) + ':' + format_real(m.weights[c][f]);
      }
    }
    out += '\n';
  }
  return out;
}

LinearModel parse_model(std::string_view text) {
  auto fail = [](const std::string& msg) -> LinearModel { throw DataError("model: " + msg); };
  const auto nl = text.find('\n');
  if (nl == std::string_view::npos) return fail("missing header");
  const std::string header(text.substr(0, nl));

  std::size_t classes = 0, dim = 0;
  char cbuf[64] = {};
  if (std::sscanf(header.c_str(), "GMMK-LINEAR classes=%zu dim=%zu C=%63s", &classes, &dim, cbuf) != 3) {
    return fail("bad header");
  }
  LinearModel m;
  m.dim = dim;
  {
    const std::string_view c(cbuf);
    auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), m.C);
    if (ec != std::errc() || ptr != c.data() + c.size()) return fail("bad C");
  }

  // The remaining rows reuse the dataset grammar: label, then bias at index 0.
  std::string body;
  std::size_t pos = nl + 1;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    const auto sp1 = line.find(' ');
    if (sp1 == std::string_view::npos) return fail("bad class row");
    const auto sp2 = line.find(' ', sp1 + 1);
    const auto label_str = std::string(line.substr(0, sp1));
    const auto bias_str = line.substr(sp1 + 1, sp2 == std::string_view::npos ? std::string_view::npos
                                                                             : sp2 - sp1 - 1);
    int label = 0;
    auto [lp, lec] = std::from_chars(label_str.data(), label_str.data() + label_str.size(), label);
    if (lec != std::errc() || lp != label_str.data() + label_str.size()) return fail("bad label");
    double bias = 0.0;
    auto [bp, bec] = std::from_chars(bias_str.data(), bias_str.data() + bias_str.size(), bias);
    if (bec != std::errc() || bp != bias_str.data() + bias_str.size()) return fail("bad bias");

    std::vector<double> w(dim, 0.0);
    if (sp2 != std::string_view::npos) {
      const auto row = parse_dataset("0 " + std::string(line.substr(sp2 + 1)) + "\n",
                                     ParseOptions{dim, false});
      for (const auto& e : row[0].vector.entries()) w[e.index - 1] = e.value;
    }
    m.classes.push_back(label);
    m.bias.push_back(bias);
    m.weights.push_back(std::move(w));
  }
  if (m.classes.size() != classes) return fail("class count does not match header");
  if (!std::is_sorted(m.classes.begin(), m.classes.end())) return fail("classes not ascending");
  return m;
}

}  // namespace gmmk
