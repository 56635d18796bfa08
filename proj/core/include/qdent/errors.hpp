#pragma once

#include <stdexcept>
#include <string>

namespace qdent {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

/// A precondition on an input (Hermiticity, parameter range) was violated.
struct ContractViolation : Error {
  using Error::Error;
};

struct PositivityError : Error {
  using Error::Error;
};

struct InvalidStateError : Error {
  using Error::Error;
};

struct StepTooLargeError : Error {
  StepTooLargeError(const std::string& what, double tail)
      : Error(what), tail_estimate(tail) {}
  double tail_estimate;
};

struct CalibrationError : Error {
  using Error::Error;
};

/// Raised when the evolved state stops being finite. Carries the time of the
/// offending step.
struct NumericFailure : Error {
  NumericFailure(const std::string& what, double time) : Error(what), t(time) {}
  double t;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qdent
