#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "dualflow/flux.hpp"
#include "dualflow/measure.hpp"

namespace dualflow {

/// Malformed scenario; the message names the offending field.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct Tolerances {
  double mass = 1e-12;
  double momentum = 1e-10;
  double oleinik_factor = 5.0;        // x dx
  double pushforward_factor = 5.0;    // x dx x Lip(phi)
  double oracle_factor = 3.0;         // x dx
  double weak_residual_factor = 2.0;  // x dx
  double center_of_mass = 1e-12;
};

struct Scenario {
  std::string name;
  nlohmann::json flux_block;
  FluxModel flux = FluxModel::quadratic_attractive();
  InitialData initial = UniformDensity{};
  GridSpec grid;
  double t_end = 1.0;
  double cfl = 0.45;
  std::vector<double> output_times;
  std::vector<std::string> checks;  // empty: every applicable check
  Tolerances tol;
  std::string output_directory = "out";
  std::vector<std::string> formats{"csv", "json"};
  nlohmann::json source;  // the parsed document, echoed into reports

  bool atomic() const { return std::holds_alternative<AtomicMeasure>(initial); }
  bool attractive() const { return flux.is_nonincreasing(0.0, total_mass(initial)); }
  bool wants(const std::string& check) const;
};

/// {"kind": ..., "coeffs": [...]} or, for piecewise-linear-a, {"kind": ..., "knots": [[u, a], ...]}.
FluxModel flux_from_json(const nlohmann::json& block, const std::string& where = "flux");

Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

/// Names accepted in diagnostics.checks.
const std::vector<std::string>& known_checks();

}  // namespace dualflow
