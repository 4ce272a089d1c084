#pragma once

#include <stdexcept>
#include <string>

namespace hdrelay {

// Input that violates a documented precondition (bad dimensions, NaN gains, ...).
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Problem size exceeds an exhaustive-enumeration limit.
struct RefusalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An iterative method failed to reach its tolerance.
struct ConvergenceError : std::runtime_error {
  double best_bound;
  ConvergenceError(const std::string& what, double bound)
      : std::runtime_error(what), best_bound(bound) {}
};

// Pivot magnitudes below the numerical floor persisted during a simplex solve.
struct DegeneracyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A claimed bound failed on a concrete instance; what() carries the witness.
struct CertificateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hdrelay
