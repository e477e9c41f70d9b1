#pragma once

#include <stdexcept>
#include <string>

namespace netgame {

/// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed inputs: non-square matrices, dimension mismatches, bad
/// partitions, unparsable files.
struct StructuralError : Error {
  using Error::Error;
};

/// A documented precondition does not hold (e.g. a spectral condition on the
/// interaction matrix).
struct PreconditionError : Error {
  using Error::Error;
};

/// Numerical breakdown: ill-conditioned solves, eigensolver failure.
struct NumericalError : Error {
  using Error::Error;
};

/// Iteration limit reached before the convergence test was met.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), residual(last_residual) {}
  double residual;
};

/// A quantity whose mathematical definition degenerates (0/0 ratios,
/// zero shadow prices where an inverse is required).
struct UndefinedValueError : Error {
  using Error::Error;
};

}  // namespace netgame
