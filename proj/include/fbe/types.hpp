#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fbe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;  // column-major: features are scanned column by column
using IndexVector = Eigen::VectorXi;

/// Bad configuration or arguments supplied by the caller.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data that cannot support the requested computation.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A fit whose population lacks one of the two classes it needs.
class DegenerateFitError : public DataError {
 public:
  using DataError::DataError;
};

inline double sigmoid(double margin) {
  if (margin >= 0.0) return 1.0 / (1.0 + std::exp(-margin));
  const double e = std::exp(margin);
  return e / (1.0 + e);
}

}  // namespace fbe
