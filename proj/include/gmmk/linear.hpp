#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmmk/vectors.hpp"

namespace gmmk {

// One-vs-rest L2-regularized logistic regression.
struct LinearModel {
  std::vector<int> classes;                  // ascending
  std::size_t dim = 0;
  double C = 1.0;
  std::vector<std::vector<double>> weights;  // [class][feature], dense
  std::vector<double> bias;                  // [class]

  std::size_t num_classes() const { return classes.size(); }
};

struct TrainOptions {
  double C = 1.0;
  std::size_t epochs = 200;
  // Recorded for reproducibility; descent starts from zero weights and uses
  // no random draws.
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// Objective value per accepted epoch, one series per class.
struct TrainTrace {
  std::vector<std::vector<double>> loss;
};

// Per class c the objective is
//   lambda/2 * |w|^2 + mean_i log(1 + exp(-y_i (w.x_i + b))),
// with y_i = +1 for label c and -1 otherwise, and lambda = 1 / (C n). The bias
// is not regularized.
//
// Step schedule: start at 1/L with L = (max_i |x_i|^2 + 1)/4 + lambda, a
// bound on the gradient's Lipschitz constant. Each epoch tries the current
// step; on an objective increase the step is halved (up to 60 times) and the
// epoch retried, on acceptance the next epoch starts from twice the step.
// If no halving is accepted the class is converged and stops early.
LinearModel train(const LabeledDataset& features, const TrainOptions& options,
                  TrainTrace* trace = nullptr);

struct ObjectiveValue {
  double value = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

// Objective and gradient for targets in {-1, +1}.
ObjectiveValue logistic_objective(const LabeledDataset& ds, std::span<const double> targets,
                                  std::span<const double> w, double b, double lambda);

std::vector<double> class_scores(const LinearModel& m, const SparseVector& x);

// Largest score; ties go to the smallest class id.
int predict(const LinearModel& m, const SparseVector& x);

double evaluate_accuracy(const LinearModel& m, const LabeledDataset& ds);

// "GMMK-LINEAR classes=<n> dim=<d> C=<c>" then one row per class:
// "<label> <bias> <idx>:<w> ..." listing nonzero weights.
std::string write_model(const LinearModel& m);
LinearModel parse_model(std::string_view text);

}  // namespace gmmk
