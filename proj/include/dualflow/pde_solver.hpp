#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "dualflow/flux.hpp"
#include "dualflow/measure.hpp"

namespace dualflow {

/// Interface flux of the scheme. Both are monotone for cfl <= 1 and converge to the entropy
/// solution. Godunov is exact upwinding; at a sonic edge (a = 0 where rho vanishes) it freezes the
/// front so the first cell keeps density close to 2/t. Rusanov adds viscosity max|a| on the local
/// interval and keeps rho <= 1/t there.
enum class NumericalFlux { Rusanov, Godunov };

double rusanov_flux(const FluxModel& model, double u_left, double u_right);
double numerical_flux(NumericalFlux kind, const FluxModel& model, double u_left, double u_right);

struct SolverConfig {
  NumericalFlux flux = NumericalFlux::Rusanov;
  double cfl = 0.45;
  /// Step used when every wave speed vanishes (pure rest state).
  double dt_max = 1.0;
};

struct SolverState {
  double t = 0.0;
  GridField field;
  double cfl = 0.45;
  std::size_t step_count = 0;
  /// Set once a wave has reached the first or last interior face.
  bool boundary_touched = false;
  NumericalFlux flux = NumericalFlux::Rusanov;
};

SolverState initial_state(GridField field, double cfl = SolverConfig{}.cfl,
                          NumericalFlux flux = SolverConfig{}.flux);

/// cfl * dx / max|a| over the range of u; `dt_max` when that maximum is zero.
double stable_dt(const SolverState& state, const FluxModel& model, double dt_max = SolverConfig{}.dt_max);

/// One explicit conservative step for du/dt + dA(u)/dx = 0 on the face samples of u, treated as
/// cell averages of a staggered grid, with the two boundary faces held at 0 and the total mass.
/// The step length is the stable step, shortened to `dt_cap` when that is smaller.
SolverState step(const SolverState& state, const FluxModel& model,
                 double dt_cap = std::numeric_limits<double>::infinity(),
                 double dt_max = SolverConfig{}.dt_max);

using StepObserver = std::function<void(const SolverState&)>;

/// Steps to t_end, landing exactly on each requested output time (sorted, within [0, t_end]).
/// Returns one snapshot per output time; with no output times, the final state only. The observer,
/// when set, sees every state after each step.
std::vector<SolverState> run(const GridField& initial, const FluxModel& model, double t_end,
                             const SolverConfig& config, std::vector<double> output_times,
                             const StepObserver& observer = {});
std::vector<SolverState> run(const GridField& initial, const FluxModel& model, double t_end,
                             double cfl, std::vector<double> output_times,
                             const StepObserver& observer = {});

/// Per-cell momentum q_i = A(u_{i+1}) - A(u_i); sums to A(total mass) - A(0).
std::vector<double> momentum_field(const SolverState& state, const FluxModel& model);

}  // namespace dualflow
