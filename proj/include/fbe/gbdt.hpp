#pragma once

// Newton-boosted regression trees on the fairness-regularized objective
// (1 - lambda) * cross_entropy + lambda * C * sum_i phi_i^2, where phi are the
// SHAP values of Z under a linear surrogate refit to the scores every round.

#include <cstdint>
#include <string>
#include <vector>

#include "fbe/data.hpp"
#include "fbe/tree.hpp"
#include "fbe/types.hpp"

namespace fbe {

struct GbdtConfig {
  double lambda = 0.0;
  double C = 1.0;
  int rounds = 300;
  double learning_rate = 0.1;
  int max_depth = 4;
  double min_child_hessian = 1.0;
  double leaf_l2 = 1.0;
  double base_margin = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Smallest per-row hessian handed to the tree grower.
inline constexpr double kHessianFloor = 1e-6;

struct ObjectiveEval {
  Vector grad;         // d loss / d margin_i
  Vector hess;         // exact d^2 loss / d margin_i^2
  Vector newton_hess;  // regularizer curvature clamped at 0, total floored at kHessianFloor
  double loss = 0.0;
  double cross_entropy = 0.0;
  double regularizer = 0.0;
  double surrogate_beta = 0.0;
  double mean_abs_ce_grad = 0.0;   // mean |d cross_entropy / d margin_i|
  double mean_abs_reg_grad = 0.0;  // mean |d R / d margin_i|
};

/// Loss and per-row derivatives with respect to the margin. With lambda = 0 the
/// surrogate is never fitted.
ObjectiveEval composite_objective(const Vector& y, const Vector& z, const Vector& margin, double lambda, double C);

struct GbdtModel {
  std::vector<RegressionTree> trees;
  double learning_rate = 0.1;
  double base_margin = 0.0;
  std::vector<std::string> feature_names;

  Vector predict_margin(const Matrix& x) const;
  Vector predict_proba(const Matrix& x) const;

  friend bool operator==(const GbdtModel&, const GbdtModel&) = default;
};

struct GbdtTrace {
  std::vector<double> losses;  // objective before each round, then after the last
  Vector final_margin;
  // component gradient magnitudes at round min(100, rounds) - 1
  int diagnostic_round = -1;
  double mean_abs_ce_grad = 0.0;
  double mean_abs_reg_grad = 0.0;
};

GbdtModel train_shapsqueeze(const Dataset& ds, const GbdtConfig& cfg, GbdtTrace* trace = nullptr);

}  // namespace fbe
