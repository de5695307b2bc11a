#pragma once

#include <stdexcept>
#include <string>

namespace sinrkit {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad user input: malformed spec, out-of-range parameter, dimension mismatch.
// The CLI maps these to exit code 2. Messages carry a field path when the
// offending value came from a config structure, e.g. "ensemble.mu[1]: ...".
struct ConfigError : Error {
  using Error::Error;
};

// A numerical routine could not deliver a trustworthy result. CLI exit code 3.
struct NumericalError : Error {
  using Error::Error;
};

struct NotPositiveDefinite : NumericalError {
  using NumericalError::NumericalError;
};

// Gamma-function evaluation requested exactly on a pole.
struct PoleAtNonpositiveInteger : NumericalError {
  using NumericalError::NumericalError;
};

// Mellin-Barnes parameter set admits neither a separating contour nor a
// convergent residue series.
struct InadmissibleParameters : NumericalError {
  using NumericalError::NumericalError;
};

// Cancellation or non-convergence ate the requested accuracy.
struct PrecisionLoss : NumericalError {
  using NumericalError::NumericalError;
};

// Adaptive refinement hit its depth limit before reaching tolerance.
struct MaxDepthExceeded : NumericalError {
  using NumericalError::NumericalError;
};

// Monte Carlo rejected more draws than the configured budget allows.
struct ExcessiveRejections : NumericalError {
  using NumericalError::NumericalError;
};

// The two independent evaluation routes for the same quantity disagree by
// more than their combined error estimates.
struct ConsistencyError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace sinrkit
