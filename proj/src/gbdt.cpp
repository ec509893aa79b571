#include "fbe/gbdt.hpp"

#include <cmath>
#include <string>

#include "fbe/surrogate.hpp"

namespace fbe {

void GbdtConfig::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("gbdt: lambda must lie in [0, 1]");
  if (!(C > 0.0)) throw ValidationError("gbdt: C must be positive");
  if (rounds < 1) throw ValidationError("gbdt: rounds must be at least 1");
  if (!(learning_rate > 0.0)) throw ValidationError("gbdt: learning_rate must be positive");
  if (max_depth < 0) throw ValidationError("gbdt: max_depth must be non-negative");
  if (!(min_child_hessian >= 0.0)) throw ValidationError("gbdt: min_child_hessian must be non-negative");
  if (!(leaf_l2 >= 0.0)) throw ValidationError("gbdt: leaf_l2 must be non-negative");
  if (!std::isfinite(base_margin)) throw ValidationError("gbdt: base_margin must be finite");
}

namespace {

// log(1 + e^m), stable for large |m|
double softplus(double m) { return m > 0.0 ? m + std::log1p(std::exp(-m)) : std::log1p(std::exp(m)); }

}  // namespace

ObjectiveEval composite_objective(const Vector& y, const Vector& z, const Vector& margin, double lambda, double C) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ValidationError("objective: lambda must lie in [0, 1]");
  const auto n = margin.size();
  if (y.size() != n || z.size() != n) throw ValidationError("objective: y, z and margin differ in length");

  const Vector p = margin.unaryExpr([](double m) { return sigmoid(m); });
  const Vector d = (p.array() * (1.0 - p.array())).matrix();

  ObjectiveEval out;
  double ce = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) ce += softplus(margin(i)) - y(i) * margin(i);
  out.cross_entropy = ce;
  const Vector ce_grad = p - y;
  out.mean_abs_ce_grad = n > 0 ? ce_grad.cwiseAbs().mean() : 0.0;

  if (lambda == 0.0) {
    out.grad = ce_grad;
    out.hess = d;
    out.newton_hess = d.cwiseMax(kHessianFloor);
    out.loss = ce;
    return out;
  }

  const auto reg = regularizer(z, p, C);
  out.regularizer = reg.value;
  out.surrogate_beta = reg.surrogate.beta;

  // chain rule through p = sigmoid(margin): dp/dm = d, d^2p/dm^2 = d (1 - 2p)
  const Vector reg_grad = (reg.grad.array() * d.array()).matrix();
  const Vector reg_hess =
      (reg.hess_diag.array() * d.array().square() + reg.grad.array() * d.array() * (1.0 - 2.0 * p.array())).matrix();
  out.mean_abs_reg_grad = reg_grad.cwiseAbs().mean();

  out.grad = (1.0 - lambda) * ce_grad + lambda * reg_grad;
  out.hess = (1.0 - lambda) * d + lambda * reg_hess;
  out.newton_hess = ((1.0 - lambda) * d + lambda * reg_hess.cwiseMax(0.0)).cwiseMax(kHessianFloor);
  out.loss = (1.0 - lambda) * ce + lambda * reg.value;
  return out;
}

Vector GbdtModel::predict_margin(const Matrix& x) const {
  if (x.cols() != static_cast<Eigen::Index>(feature_names.size())) {
    throw ValidationError("predict: expected " + std::to_string(feature_names.size()) + " feature columns, got " +
                          std::to_string(x.cols()));
  }
  Vector margin = Vector::Constant(x.rows(), base_margin);
  for (const auto& tree : trees) margin += learning_rate * tree.predict(x);
  return margin;
}

Vector GbdtModel::predict_proba(const Matrix& x) const {
  return predict_margin(x).unaryExpr([](double m) { return sigmoid(m); });
}

GbdtModel train_shapsqueeze(const Dataset& ds, const GbdtConfig& cfg, GbdtTrace* trace) {
  cfg.validate();
  ds.validate();
  if (ds.n_rows() == 0) throw DataError("train: empty dataset");

  GbdtModel model;
  model.learning_rate = cfg.learning_rate;
  model.base_margin = cfg.base_margin;
  model.feature_names = ds.feature_names;

  const SortedColumns sorted(ds.features);
  const NewtonSplit criterion{cfg.leaf_l2, cfg.min_child_hessian};
  const GrowOptions grow{cfg.max_depth};
  const int diagnostic_round = std::min(100, cfg.rounds) - 1;

  Vector margin = Vector::Constant(ds.n_rows(), cfg.base_margin);
  std::vector<NewtonSplit::Stats> stats(static_cast<std::size_t>(ds.n_rows()));
  for (int round = 0; round < cfg.rounds; ++round) {
    const auto obj = composite_objective(ds.y, ds.z, margin, cfg.lambda, cfg.C);
    if (!obj.grad.allFinite() || !obj.newton_hess.allFinite()) {
      throw DataError("train: non-finite gradient at round " + std::to_string(round) +
                      " (surrogate beta = " + std::to_string(obj.surrogate_beta) + ")");
    }
    if (trace != nullptr) {
      trace->losses.push_back(obj.loss);
      if (round == diagnostic_round) {
        trace->diagnostic_round = round;
        trace->mean_abs_ce_grad = obj.mean_abs_ce_grad;
        trace->mean_abs_reg_grad = obj.mean_abs_reg_grad;
      }
    }
    for (Eigen::Index i = 0; i < ds.n_rows(); ++i) {
      stats[static_cast<std::size_t>(i)] = {obj.grad(i), obj.newton_hess(i)};
    }
    auto tree = grow_tree(ds.features, sorted, std::span<const NewtonSplit::Stats>(stats), criterion, grow);
    margin += cfg.learning_rate * tree.predict(ds.features);
    model.trees.push_back(std::move(tree));
  }
  if (trace != nullptr) {
    trace->losses.push_back(composite_objective(ds.y, ds.z, margin, cfg.lambda, cfg.C).loss);
    trace->final_margin = margin;
  }
  return model;
}

}  // namespace fbe
