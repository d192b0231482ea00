#include <chisel/errors.hpp>

namespace chisel {

std::string validation_code_name(ValidationError::Code code) {
  switch (code) {
    case ValidationError::Code::ParseError: return "ParseError";
    case ValidationError::Code::DomainViolation: return "DomainViolation";
    case ValidationError::Code::MeanNotInterior: return "MeanNotInterior";
    case ValidationError::Code::CompatibilityViolation: return "CompatibilityViolation";
    case ValidationError::Code::CoercivityFailure: return "CoercivityFailure";
    case ValidationError::Code::BadValue: return "BadValue";
  }
  return "Unknown";
}

std::string format_errors(const std::vector<ValidationError>& errors) {
  std::string s = "config validation failed:";
  for (const auto& e : errors) s += "\n  [" + validation_code_name(e.code) + "] " + e.message;
  return s;
}

}  // namespace chisel
