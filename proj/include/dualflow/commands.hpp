#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dualflow/analysis.hpp"
#include "dualflow/particle_solver.hpp"
#include "dualflow/pde_solver.hpp"
#include "dualflow/scenario.hpp"

namespace dualflow {

enum class Engine { Pde, Particles, Both };

Engine parse_engine(const std::string& name);

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitValidation = 2;

struct TrajectoryRow {
  double t;
  std::size_t id;
  double x;
  double m;
  double v;
};

/// Everything one scenario run produces.
struct Evaluation {
  Engine engine = Engine::Pde;
  std::vector<SolverState> pde_outputs;  // one per output time
  std::vector<SolverState> pde_dense;    // output times plus evenly spaced samples, for the weak residual
  double max_mass_error = 0.0;           // over every PDE step
  bool boundary_touched = false;
  std::vector<AtomicMeasure> particle_outputs;  // one per output time
  std::vector<TrajectoryRow> trajectory;
  EventLog events;
  DiagnosticsReport report;
};

/// Runs the requested engines and every applicable check the scenario asks for. Throws
/// RefusedError when particles are requested for a non-attractive flux or non-atomic data.
Evaluation evaluate(const Scenario& scenario, Engine engine);

/// Engines that apply to the scenario: both for attractive atomic data, else the PDE alone.
Engine default_engine(const Scenario& scenario);

/// Exact reference primitive at t_end when one exists: the aggregate solution for attractive
/// atomic data, the centred rarefaction for a single atom under the repulsive quadratic flux.
std::optional<Primitive> reference_solution(const Scenario& scenario, double t);

struct ConvergenceRow {
  std::size_t n_cells = 0;
  double dx = 0.0;
  double l1_error = 0.0;        // NaN for the finest grid when it is the reference
  double observed_order = 0.0;  // NaN on the first row
  double weak_residual = 0.0;
  double residual_ratio = 0.0;  // previous / current, NaN on the first row
};

std::vector<ConvergenceRow> convergence_study(const Scenario& scenario, std::vector<std::size_t> resolutions,
                                              std::size_t time_samples = 200);

/// Without an explicit engine, runs default_engine(scenario).
int cmd_run(const std::filesystem::path& scenario, std::optional<Engine> engine,
            const std::optional<std::filesystem::path>& out, std::ostream& os, std::ostream& err);
int cmd_validate(const std::filesystem::path& scenario, const std::optional<std::filesystem::path>& out,
                 std::ostream& os, std::ostream& err);
int cmd_convergence(const std::filesystem::path& scenario, const std::vector<std::size_t>& resolutions,
                    const std::optional<std::filesystem::path>& out, std::ostream& os, std::ostream& err);
int cmd_riemann(const nlohmann::json& flux, double u_minus, double u_plus, std::ostream& os, std::ostream& err);

/// "100,200,400" -> {100, 200, 400}.
std::vector<std::size_t> parse_resolutions(const std::string& text);

}  // namespace dualflow
