#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace lwire {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An operation was asked for in a coupling regime it does not cover.
class InvalidRegime : public Error {
 public:
  using Error::Error;
};

/// Curvature was queried at a point where the tangent jumps.
class CornerError : public Error {
 public:
  using Error::Error;
};

/// A geometric configuration lacks a property the computation relies on.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Sparse LDL^T of A - sigma I broke down even after perturbing sigma.
class FactorizationBreakdown : public Error {
 public:
  using Error::Error;
};

/// Quadrature refinement did not settle within the requested tolerance.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration file or command-line input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The iterative eigensolver ran out of iterations.  Carries the best
/// Ritz values and residuals reached so far.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, std::vector<double> best_values,
                     std::vector<double> best_residuals)
      : Error(what),
        best_values_(std::move(best_values)),
        best_residuals_(std::move(best_residuals)) {}

  const std::vector<double>& best_values() const noexcept { return best_values_; }
  const std::vector<double>& best_residuals() const noexcept { return best_residuals_; }

 private:
  std::vector<double> best_values_;
  std::vector<double> best_residuals_;
};

}  // namespace lwire
