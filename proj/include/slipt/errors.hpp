#pragma once

#include <stdexcept>
#include <string>

namespace slipt {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An argument is outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

/// A receiver / signal description is internally inconsistent.
struct ConfigError : Error {
  using Error::Error;
};

/// A model was asked to solve a receiver it does not apply to.
struct ModelMismatchError : Error {
  using Error::Error;
};

/// An iterative solver failed to bracket or converge.
struct SolverError : Error {
  using Error::Error;
};

/// A diode exponential was evaluated beyond the overflow guard.
/// `sign` records the direction of the saturated exponent.
struct SaturationError : Error {
  SaturationError(const std::string& what, int sign_) : Error(what), sign(sign_) {}
  int sign;
};

/// An input distribution collapsed to a point mass (theta == 0).
struct DegenerateDistributionError : Error {
  using Error::Error;
};

/// The transient integrator failed at a specific time.
struct IntegratorError : Error {
  IntegratorError(const std::string& what, double t_) : Error(what), t(t_) {}
  double t;
};

}  // namespace slipt
