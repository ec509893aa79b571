#include "fbe/adaboost.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbe/surrogate.hpp"

namespace fbe {

void EnforceConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("adaboost: lambda must lie in [0, 1]");
  if (rounds < 1) throw ValidationError("adaboost: rounds must be at least 1");
  if (weak_max_depth < 1) throw ValidationError("adaboost: weak_max_depth must be at least 1");
  if (!(error_clamp_eps > 0.0 && error_clamp_eps < 0.5)) {
    throw ValidationError("adaboost: error_clamp_eps must lie in (0, 0.5)");
  }
}

Vector ShapEnforceModel::predict_score(const Matrix& x) const {
  if (stages.empty()) throw ValidationError("predict: ensemble has no stages");
  if (x.cols() != static_cast<Eigen::Index>(feature_names.size())) {
    throw ValidationError("predict: expected " + std::to_string(feature_names.size()) + " feature columns, got " +
                          std::to_string(x.cols()));
  }
  double alpha_sum = 0.0;
  Vector score = Vector::Zero(x.rows());
  for (const auto& stage : stages) {
    Vector vote = stage.learner.predict(x);
    if (this->vote == StageVote::label) vote = (vote.array() >= 0.5).cast<double>().matrix();
    score += stage.alpha * vote;
    alpha_sum += stage.alpha;
  }
  if (!(alpha_sum > 0.0)) throw DataError("predict: degenerate ensemble, stage weights sum to a non-positive value");
  return score / alpha_sum;
}

Vector weight_update(const Vector& omega, const Vector& yhat, const Vector& y, double alpha, const Vector& penalty,
                     double lambda, UpdateRule rule) {
  const auto n = omega.size();
  if (yhat.size() != n || y.size() != n || penalty.size() != n) {
    throw ValidationError("weight_update: input lengths differ");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("weight_update: lambda must lie in [0, 1]");
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool wrong = y(i) != yhat(i);
    const double exponent = rule == UpdateRule::classical ? (wrong ? alpha : 0.0) : (wrong ? alpha : -alpha);
    out(i) = omega(i) * ((1.0 - lambda) * std::exp(exponent) + lambda * std::exp(penalty(i)));
  }
  const double total = out.sum();
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DataError("weight_update: weights vanished or overflowed");
  }
  return out / total;
}

RegressionTree fit_weak_learner(const Matrix& x, const SortedColumns& sorted, const Vector& y, const Vector& omega,
                                int max_depth) {
  std::vector<GiniSplit::Stats> stats(static_cast<std::size_t>(y.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) stats[static_cast<std::size_t>(i)] = {omega(i), omega(i) * y(i)};
  return grow_tree(x, sorted, std::span<const GiniSplit::Stats>(stats), GiniSplit{}, GrowOptions{max_depth});
}

ShapEnforceModel train_shapenforce(const Dataset& ds, const EnforceConfig& cfg, const EnforceObserver& observer) {
  cfg.validate();
  ds.validate();
  const auto n = ds.n_rows();
  if (n == 0) throw DataError("train: empty dataset");

  ShapEnforceModel model;
  model.vote = cfg.vote;
  model.feature_names = ds.feature_names;

  const SortedColumns sorted(ds.features);
  Vector omega = Vector::Constant(n, 1.0 / static_cast<double>(n));
  Vector penalty_values = Vector::Zero(n);
  for (int round = 0; round < cfg.rounds; ++round) {
    auto learner = fit_weak_learner(ds.features, sorted, ds.y, omega, cfg.weak_max_depth);
    const Vector ybar = learner.predict(ds.features);
    const Vector yhat = (ybar.array() >= 0.5).cast<double>().matrix();

    double beta = 0.0;
    if (cfg.lambda > 0.0) {
      const auto s = fit_surrogate(ds.z, ybar, (ds.y.array() == 1.0).cast<int>());
      beta = s.beta;
      penalty_values = penalty(s, ds.z, ds.y);
    }

    const Vector miss = (ds.y.array() != yhat.array()).cast<double>().matrix();
    const double error = omega.dot(miss);
    const double clamped = std::clamp(error, cfg.error_clamp_eps, 1.0 - cfg.error_clamp_eps);
    const double alpha = std::log((1.0 - clamped) / clamped);

    omega = weight_update(omega, yhat, ds.y, alpha, penalty_values, cfg.lambda, cfg.update);
    model.stages.push_back({alpha, std::move(learner)});
    if (observer) observer(EnforceRound{round, error, alpha, beta, &omega});
  }
  return model;
}

}  // namespace fbe
