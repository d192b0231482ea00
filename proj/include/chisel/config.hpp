#pragma once

#include <chisel/errors.hpp>
#include <chisel/solver.hpp>

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace chisel {

/// Perturbation applied by the perturb-study command: target source field,
/// magnitude, and spatial shape.
struct PerturbSpec {
  std::string target = "g";  // "g" or "g_gamma"
  double delta = 0.1;
  FieldProfile shape = FieldProfile::fourier(1.0, 1);
};

/// Settings of the manufactured-solution convergence command.
struct ConvergenceSpec {
  double t_final = 0.096;
  std::vector<double> dt_list = {4e-3, 2e-3, 1e-3};  // fixed-grid temporal sweep
  int time_nx = 128, time_ny = 65;
  std::vector<std::pair<int, int>> space_grids = {{32, 17}, {64, 33}, {128, 65}};
  std::vector<double> space_dt_list = {9.6e-3, 2.4e-3, 6e-4};  // dt ~ h^2 coupling
  double lambda_value = 1.0;
  double lambda_gamma_value = 1.0;
};

struct ParsedConfig {
  RunConfig config;
  nlohmann::json resolved;  // fully-defaulted document (manifest payload)
  std::vector<double> eps_list = {0.2, 0.1, 0.05};
  PerturbSpec perturb;
  ConvergenceSpec convergence;
};

struct ConfigParseResult {
  bool ok = false;
  ParsedConfig parsed;
  std::vector<ValidationError> errors;
};

/// Strict parse of the JSON config text: unknown keys are errors, defaults
/// applied for missing keys, range checks on scalars, then (optionally) the
/// solver-level structural validation.
ConfigParseResult parse_config(const std::string& text, bool run_validators = true);

/// Applies a dotted-key override (value parsed as JSON when possible, else
/// taken as a string) onto a config document. Intermediate path components
/// must exist as objects either in the document or in the schema skeleton
/// (missing ones are created when the skeleton carries them).
void apply_override(nlohmann::json& doc, const std::string& dotted_key,
                    const std::string& raw_value, const nlohmann::json* skeleton = nullptr);

/// The full default document (also the parse-time schema skeleton).
nlohmann::json default_config_doc();

}  // namespace chisel
