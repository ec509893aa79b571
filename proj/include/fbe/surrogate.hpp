#pragma once

// Univariate linear surrogate ybar = beta * z + alpha and the attribution-based
// fairness terms built on it. Everything here is closed form: a refit is O(N).

#include <cmath>

#include <Eigen/Dense>

#include "fbe/types.hpp"

namespace fbe {

template <typename Scalar = double>
struct LinearSurrogate {
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Scalar beta = 0;
  Scalar alpha = 0;
  Scalar z_mean = 0;  // E[Z] over the fit population
  Scalar s_zz = 0;    // sum of (z_i - z_mean)^2 over the fit population
  Eigen::Index fit_count = 0;

  Scalar predict(Scalar z) const { return beta * z + alpha; }

  // Base value of the additive explanation: the prediction at E[Z].
  Scalar alpha_shap() const { return alpha + beta * z_mean; }

  template <typename Derived>
  VectorType predict(const Eigen::MatrixBase<Derived>& z) const {
    return (beta * z.array() + alpha).matrix();
  }
};

namespace detail {

template <typename DerivedZ, typename DerivedY, typename Selected>
LinearSurrogate<typename DerivedZ::Scalar> fit_selected(const Eigen::MatrixBase<DerivedZ>& z,
                                                        const Eigen::MatrixBase<DerivedY>& ybar,
                                                        Selected&& selected) {
  using Scalar = typename DerivedZ::Scalar;
  if (z.size() != ybar.size()) {
    throw ValidationError("surrogate fit: z and ybar differ in length");
  }
  const Eigen::Index n = z.size();
  Eigen::Index count = 0;
  Scalar z_sum = 0;
  Scalar y_sum = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!selected(i)) continue;
    ++count;
    z_sum += z(i);
    y_sum += ybar(i);
  }
  if (count == 0) {
    throw DegenerateFitError("surrogate fit: empty population");
  }
  const Scalar z_mean = z_sum / static_cast<Scalar>(count);
  const Scalar y_mean = y_sum / static_cast<Scalar>(count);
  Scalar s_zz = 0;
  Scalar s_zy = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!selected(i)) continue;
    const Scalar dz = z(i) - z_mean;
    s_zz += dz * dz;
    s_zy += dz * (ybar(i) - y_mean);
  }
  if (!(s_zz > 0)) {
    throw DegenerateFitError("surrogate fit: protected attribute takes a single value in the fit population");
  }
  LinearSurrogate<Scalar> s;
  s.beta = s_zy / s_zz;
  s.alpha = y_mean - s.beta * z_mean;
  s.z_mean = z_mean;
  s.s_zz = s_zz;
  s.fit_count = count;
  return s;
}

}  // namespace detail

/// Least-squares fit of ybar on z over every row.
template <typename DerivedZ, typename DerivedY>
LinearSurrogate<typename DerivedZ::Scalar> fit_surrogate(const Eigen::MatrixBase<DerivedZ>& z,
                                                         const Eigen::MatrixBase<DerivedY>& ybar) {
  return detail::fit_selected(z, ybar, [](Eigen::Index) { return true; });
}

/// Least-squares fit over the rows whose mask entry is nonzero.
template <typename DerivedZ, typename DerivedY, typename DerivedM>
LinearSurrogate<typename DerivedZ::Scalar> fit_surrogate(const Eigen::MatrixBase<DerivedZ>& z,
                                                         const Eigen::MatrixBase<DerivedY>& ybar,
                                                         const Eigen::DenseBase<DerivedM>& mask) {
  if (mask.size() != z.size()) {
    throw ValidationError("surrogate fit: mask length differs from z");
  }
  return detail::fit_selected(z, ybar, [&mask](Eigen::Index i) { return mask(i) != 0; });
}

/// SHAP value of Z for each row: beta * (z_i - E[Z]).
template <typename Scalar, typename DerivedZ>
typename LinearSurrogate<Scalar>::VectorType shap_values(const LinearSurrogate<Scalar>& s,
                                                         const Eigen::MatrixBase<DerivedZ>& z) {
  return (s.beta * (z.array() - s.z_mean)).matrix();
}

template <typename Scalar = double>
struct RegularizerEval {
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Scalar value = 0;     // C * sum_i phi_i^2
  VectorType grad;      // dR / dybar_i, with beta treated as a function of ybar
  VectorType hess_diag; // d^2R / dybar_i^2
  Scalar C = 1;
  LinearSurrogate<Scalar> surrogate;
};

/// Squared-attribution regularizer R = C * sum_i phi_i^2 with its derivatives
/// with respect to the scores. Since R = C * beta^2 * s_zz and
/// d beta / d ybar_k = (z_k - z_mean) / s_zz, the gradient is 2 C beta (z_k - z_mean)
/// and the diagonal curvature is 2 C (z_k - z_mean)^2 / s_zz.
template <typename DerivedZ, typename DerivedY>
RegularizerEval<typename DerivedZ::Scalar> regularizer(const Eigen::MatrixBase<DerivedZ>& z,
                                                       const Eigen::MatrixBase<DerivedY>& ybar,
                                                       typename DerivedZ::Scalar C) {
  using Scalar = typename DerivedZ::Scalar;
  if (!(C > 0)) {
    throw ValidationError("regularizer: C must be positive");
  }
  RegularizerEval<Scalar> out;
  out.C = C;
  out.surrogate = fit_surrogate(z, ybar);
  const auto& s = out.surrogate;
  const auto centered = (z.array() - s.z_mean);
  out.value = C * shap_values(s, z).squaredNorm();
  out.grad = (Scalar(2) * C * s.beta * centered).matrix();
  out.hess_diag = (Scalar(2) * C * centered.square() / s.s_zz).matrix();
  return out;
}

/// Penalty for a surrogate already fitted on the favourable-label rows:
/// P_i = -phi_i when y_i = 1 and 0 otherwise.
template <typename Scalar, typename DerivedZ, typename DerivedL>
typename LinearSurrogate<Scalar>::VectorType penalty(const LinearSurrogate<Scalar>& s,
                                                     const Eigen::MatrixBase<DerivedZ>& z,
                                                     const Eigen::MatrixBase<DerivedL>& y) {
  using VectorType = typename LinearSurrogate<Scalar>::VectorType;
  VectorType p(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    p(i) = y(i) == 1 ? -s.beta * (z(i) - s.z_mean) : Scalar(0);
  }
  return p;
}

/// Fits the surrogate on the y = 1 rows and evaluates the penalty.
template <typename DerivedZ, typename DerivedL, typename DerivedY>
typename LinearSurrogate<typename DerivedZ::Scalar>::VectorType penalty(
    const Eigen::MatrixBase<DerivedZ>& z, const Eigen::MatrixBase<DerivedL>& y,
    const Eigen::MatrixBase<DerivedY>& ybar) {
  if (y.size() != z.size()) {
    throw ValidationError("penalty: y and z differ in length");
  }
  const auto s = fit_surrogate(z, ybar, (y.array() == 1).template cast<int>());
  return penalty(s, z, y);
}

}  // namespace fbe
