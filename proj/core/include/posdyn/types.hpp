#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace posdyn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand sizes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The model left the positive cone where positivity is required.
class PositivityViolation : public Error {
 public:
  using Error::Error;
};

/// Step-size underflow, ill-conditioned projection and similar breakdowns.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// A matrix rescaled to unit operator norm plus the log of the removed factor.
/// The represented value is exp(log_scale) * direction.
struct ScaledMatrix {
  Matrix direction;
  double log_scale = 0.0;
};

/// A unit vector plus the log of its original length.
struct ScaledVector {
  Vector direction;
  double log_scale = 0.0;
};

}  // namespace posdyn
