#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chisel {

/// Evaluation of a graph selection outside its effective domain.
class OutOfDomainError : public std::runtime_error {
 public:
  explicit OutOfDomainError(const std::string& what) : std::runtime_error(what) {}
};

/// No admissible coercivity constants on the sample grid (mean value too
/// close to the domain boundary).
class CoercivityFailureError : public std::runtime_error {
 public:
  explicit CoercivityFailureError(const std::string& what) : std::runtime_error(what) {}
};

/// Right-hand side of the inverse Neumann solve is not mean-free.
class NonzeroMeanError : public std::runtime_error {
 public:
  explicit NonzeroMeanError(const std::string& what) : std::runtime_error(what) {}
};

/// Newton failed to reduce the residual within the iteration budget.
class NewtonDivergenceError : public std::runtime_error {
 public:
  NewtonDivergenceError(const std::string& what, int step_index)
      : std::runtime_error(what), step_index(step_index) {}
  int step_index = -1;
};

/// Two runs passed to a pairwise diagnostic do not share the required data.
class ConfigMismatchError : public std::runtime_error {
 public:
  explicit ConfigMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// Separation report requested for a graph whose domain is not an open interval.
class DomainKindMismatchError : public std::runtime_error {
 public:
  explicit DomainKindMismatchError(const std::string& what) : std::runtime_error(what) {}
};

/// A per-step invariant (mass constancy, finiteness) failed during a run.
class InvariantViolationError : public std::runtime_error {
 public:
  explicit InvariantViolationError(const std::string& what) : std::runtime_error(what) {}
};

/// One entry of an aggregated validation report.
struct ValidationError {
  enum class Code {
    ParseError,
    DomainViolation,
    MeanNotInterior,
    CompatibilityViolation,
    CoercivityFailure,
    BadValue,
  };
  Code code;
  std::string message;
};

std::string validation_code_name(ValidationError::Code code);
std::string format_errors(const std::vector<ValidationError>& errors);

/// Thrown when a caller insists on a validated config and validation failed.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ValidationError> errors)
      : std::runtime_error(format_errors(errors)), errors(std::move(errors)) {}
  std::vector<ValidationError> errors;
};

}  // namespace chisel
