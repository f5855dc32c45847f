#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <type_traits>

namespace ivanov {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

/// Base class for failures of the numerical routines themselves, as opposed
/// to bad arguments. Callers that map errors to exit codes treat these as
/// "numerical failure".
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Interval bisection ran out of iterations before reaching its tolerance.
class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// A matrix that must be positive semi-definite has an eigenvalue too far
/// below zero to be attributable to rounding.
class NotPositiveSemidefiniteError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Malformed or inconsistent configuration (CLI / scenario files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ivanov
