#pragma once

// Statistical, attribution and predictive metrics for binary classifiers.
// Labels, outcomes and the protected attribute are 0/1 valued vectors; the
// privileged group is z = 1 and the favourable outcome is 1.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fbe/types.hpp"

namespace fbe {

namespace detail {

inline void require_same_length(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) throw ValidationError(std::string(what) + ": input lengths differ");
}

// Mean of `values` over rows where `select(i)` holds; throws when no row is selected.
template <typename Derived, typename Select>
double conditional_mean(const Eigen::MatrixBase<Derived>& values, Select&& select, const char* what) {
  double sum = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!select(i)) continue;
    sum += static_cast<double>(values(i));
    ++count;
  }
  if (count == 0) throw DegenerateFitError(std::string(what) + ": a required group is empty");
  return sum / static_cast<double>(count);
}

}  // namespace detail

/// yhat_i = 1 iff ybar_i >= t.
template <typename Derived>
Vector threshold_scores(const Eigen::MatrixBase<Derived>& ybar, double t) {
  if (!(t > 0.0 && t < 1.0)) throw ValidationError("threshold must lie in (0, 1)");
  return (ybar.array() >= t).template cast<double>().matrix();
}

/// |P(yhat = 1 | z = 1) - P(yhat = 1 | z = 0)|
template <typename DerivedH, typename DerivedZ>
double spd(const Eigen::MatrixBase<DerivedH>& yhat, const Eigen::MatrixBase<DerivedZ>& z) {
  detail::require_same_length(yhat.size(), z.size(), "spd");
  const double r1 = detail::conditional_mean(yhat, [&](Eigen::Index i) { return z(i) == 1; }, "spd");
  const double r0 = detail::conditional_mean(yhat, [&](Eigen::Index i) { return z(i) == 0; }, "spd");
  return std::abs(r1 - r0);
}

/// |P(yhat = 1 | y = 1, z = 1) - P(yhat = 1 | y = 1, z = 0)|
template <typename DerivedH, typename DerivedY, typename DerivedZ>
double eod(const Eigen::MatrixBase<DerivedH>& yhat, const Eigen::MatrixBase<DerivedY>& y,
           const Eigen::MatrixBase<DerivedZ>& z) {
  detail::require_same_length(yhat.size(), z.size(), "eod");
  detail::require_same_length(y.size(), z.size(), "eod");
  const double t1 =
      detail::conditional_mean(yhat, [&](Eigen::Index i) { return y(i) == 1 && z(i) == 1; }, "eod");
  const double t0 =
      detail::conditional_mean(yhat, [&](Eigen::Index i) { return y(i) == 1 && z(i) == 0; }, "eod");
  return std::abs(t1 - t0);
}

/// Gap in mean attribution between the z = 1 and z = 0 groups.
template <typename DerivedP, typename DerivedZ>
double fe(const Eigen::MatrixBase<DerivedP>& phi, const Eigen::MatrixBase<DerivedZ>& z) {
  detail::require_same_length(phi.size(), z.size(), "fe");
  const double m1 = detail::conditional_mean(phi, [&](Eigen::Index i) { return z(i) == 1; }, "fe");
  const double m0 = detail::conditional_mean(phi, [&](Eigen::Index i) { return z(i) == 0; }, "fe");
  return std::abs(m1 - m0);
}

/// Mean absolute attribution over the population.
template <typename DerivedP>
double sfe(const Eigen::MatrixBase<DerivedP>& phi) {
  if (phi.size() == 0) throw ValidationError("sfe: empty input");
  return phi.array().abs().sum() / static_cast<double>(phi.size());
}

/// Mann-Whitney estimate of ROC AUC; tied scores share their average rank.
template <typename DerivedS, typename DerivedY>
double auc(const Eigen::MatrixBase<DerivedS>& ybar, const Eigen::MatrixBase<DerivedY>& y) {
  detail::require_same_length(ybar.size(), y.size(), "auc");
  const Eigen::Index n = ybar.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return ybar(a) < ybar(b); });

  double positive_rank_sum = 0.0;
  double n_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && ybar(order[j + 1]) == ybar(order[i])) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based ranks i+1..j+1
    for (std::size_t k = i; k <= j; ++k) {
      if (y(order[k]) == 1) {
        positive_rank_sum += avg_rank;
        n_pos += 1.0;
      }
    }
    i = j + 1;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0.0 || n_neg == 0.0) throw DegenerateFitError("auc: labels contain a single class");
  return (positive_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

template <typename DerivedH, typename DerivedY>
double accuracy(const Eigen::MatrixBase<DerivedH>& yhat, const Eigen::MatrixBase<DerivedY>& y) {
  detail::require_same_length(yhat.size(), y.size(), "accuracy");
  if (y.size() == 0) throw ValidationError("accuracy: empty input");
  return (yhat.array() == y.array()).template cast<double>().mean();
}

/// TP / (TP + FP); empty when nothing is predicted positive.
template <typename DerivedH, typename DerivedY>
std::optional<double> precision(const Eigen::MatrixBase<DerivedH>& yhat, const Eigen::MatrixBase<DerivedY>& y) {
  detail::require_same_length(yhat.size(), y.size(), "precision");
  double tp = 0.0;
  double predicted = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (yhat(i) != 1) continue;
    predicted += 1.0;
    if (y(i) == 1) tp += 1.0;
  }
  if (predicted == 0.0) return std::nullopt;
  return tp / predicted;
}

}  // namespace fbe
