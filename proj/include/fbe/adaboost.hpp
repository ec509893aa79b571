#pragma once

// AdaBoost whose instance-weight update mixes the exponential update with
// e^P, P the negated SHAP value of Z under a linear surrogate fitted on the
// favourable-label rows.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fbe/data.hpp"
#include "fbe/tree.hpp"
#include "fbe/types.hpp"

namespace fbe {

/// How a stage contributes to the ensemble score.
enum class StageVote { probability, label };

/// Exponential part of the weight update.
///   classical: e^{alpha * 1[y != yhat]}  (misclassified rows scaled by (1 - e) / e)
///   symmetric: e^{alpha * (1[y != yhat] - 1[y == yhat])}
/// Both give the same normalized weights at lambda = 0 only if alpha is halved
/// in the symmetric form; with alpha = log((1 - e) / e) the symmetric form
/// hands the previous learner an error of 1 - e and can oscillate.
enum class UpdateRule { classical, symmetric };

struct EnforceConfig {
  double lambda = 0.0;
  int rounds = 100;
  int weak_max_depth = 1;
  double error_clamp_eps = 1e-6;
  StageVote vote = StageVote::label;
  UpdateRule update = UpdateRule::classical;
  std::uint64_t seed = 0;

  void validate() const;
};

struct EnforceStage {
  double alpha = 0.0;
  RegressionTree learner;  // leaves hold the weighted positive fraction

  friend bool operator==(const EnforceStage&, const EnforceStage&) = default;
};

struct ShapEnforceModel {
  std::vector<EnforceStage> stages;
  StageVote vote = StageVote::label;
  std::vector<std::string> feature_names;

  /// sum_m alpha_m * k_m(x) / sum_m alpha_m
  Vector predict_score(const Matrix& x) const;

  friend bool operator==(const ShapEnforceModel&, const ShapEnforceModel&) = default;
};

/// One reweighting step followed by renormalization:
/// w_i <- w_i * [(1 - lambda) E_i + lambda e^{P_i}], E_i the exponential factor of `rule`.
Vector weight_update(const Vector& omega, const Vector& yhat, const Vector& y, double alpha, const Vector& penalty,
                     double lambda, UpdateRule rule = UpdateRule::classical);

/// Weighted Gini tree used as the weak learner of every round.
RegressionTree fit_weak_learner(const Matrix& x, const SortedColumns& sorted, const Vector& y, const Vector& omega,
                                int max_depth);

struct EnforceRound {
  int round = 0;
  double error = 0.0;  // weighted error before clamping
  double alpha = 0.0;
  double surrogate_beta = 0.0;
  const Vector* omega = nullptr;  // weights after renormalization
};

using EnforceObserver = std::function<void(const EnforceRound&)>;

ShapEnforceModel train_shapenforce(const Dataset& ds, const EnforceConfig& cfg, const EnforceObserver& observer = {});

}  // namespace fbe
