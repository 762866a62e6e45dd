#pragma once

#include <stdexcept>
#include <string>

namespace qspeckle {

/// Error taxonomy. Each category maps to one CLI exit code (see io.hpp):
/// usage -> 2, range/validity -> 3, I/O -> 4, ensemble quality -> 5.

/// Malformed invocation or request: unknown flag, missing argument,
/// empty result asked to report, invalid mode index.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A parameter outside its physical or numerical domain
/// (ell/L outside (0,1], negative photon number, non-unitary input, ...).
struct RangeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Model validity violation: formulas used outside the diffusive regime.
struct OutOfValidityError : RangeError {
  using RangeError::RangeError;
};

/// Filesystem failure while reading configs or writing outputs.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The generated ensemble failed its own quality gates
/// (rejection budget exceeded, oracle truncation bound violated).
struct EnsembleQualityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Slice calibration could not reach the target mean transmission;
/// carries the value that was achieved.
struct CalibrationError : EnsembleQualityError {
  CalibrationError(const std::string& what, double achieved_value)
      : EnsembleQualityError(what), achieved(achieved_value) {}
  double achieved;
};

}  // namespace qspeckle
