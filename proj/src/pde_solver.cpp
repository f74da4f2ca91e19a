#include "dualflow/pde_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dualflow/errors.hpp"

namespace dualflow {
double rusanov_flux(const FluxModel& model, double u_left, double u_right) {
  if (u_left == u_right) return model.A(u_left);
  const double alpha = model.max_abs_a(std::min(u_left, u_right), std::max(u_left, u_right));
  return 0.5 * (model.A(u_left) + model.A(u_right)) - 0.5 * alpha * (u_right - u_left);
}

double numerical_flux(NumericalFlux kind, const FluxModel& model, double u_left, double u_right) {
  if (kind == NumericalFlux::Rusanov) return rusanov_flux(model, u_left, u_right);
  if (u_left == u_right) return model.A(u_left);
  if (u_left < u_right) return model.min_A(u_left, u_right);
  return model.max_A(u_right, u_left);
}

SolverState initial_state(GridField field, double cfl, NumericalFlux flux) {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw InputError("cfl must lie in (0, 1]");
  SolverState s{0.0, std::move(field), cfl, 0, false};
  s.flux = flux;
  return s;
}

double stable_dt(const SolverState& state, const FluxModel& model, double dt_max) {
  const auto u = state.field.u_faces();
  const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
  const double speed = model.max_abs_a(*lo, *hi);
  if (!std::isfinite(speed)) throw NumericalError("non-finite wave speed");
  if (speed == 0.0) return dt_max;
  return state.cfl * state.field.dx() / speed;
}

SolverState step(const SolverState& state, const FluxModel& model, double dt_cap, double dt_max) {
  const double dt = std::min(stable_dt(state, model, dt_max), dt_cap);
  if (!(dt > 0.0)) throw InputError("step: time step must be positive");

  const auto u = state.field.u_faces();
  const std::size_t n = state.field.n_cells();
  const double lambda = dt / state.field.dx();

  // flux[i] sits between samples i and i + 1
  std::vector<double> flux(n);
  for (std::size_t i = 0; i < n; ++i) flux[i] = numerical_flux(state.flux, model, u[i], u[i + 1]);

  std::vector<double> next(u.begin(), u.end());
  for (std::size_t i = 1; i < n; ++i) {
    next[i] = u[i] - lambda * (flux[i] - flux[i - 1]);
    if (!std::isfinite(next[i])) {
      throw NumericalError("step: non-finite value at face " + std::to_string(i) +
                           " (t = " + std::to_string(state.t) + ")");
    }
  }

  SolverState out{state.t + dt, GridField::from_faces(state.field.grid(), std::move(next),
                                                      state.field.total_mass()),
                  state.cfl, state.step_count + 1, state.boundary_touched, state.flux};
  const auto v = out.field.u_faces();
  if (n >= 2 && (std::abs(v[1] - u[1]) > 1e-12 || std::abs(v[n - 1] - u[n - 1]) > 1e-12)) {
    out.boundary_touched = true;
  }
  return out;
}

std::vector<SolverState> run(const GridField& initial, const FluxModel& model, double t_end,
                             double cfl, std::vector<double> output_times,
                             const StepObserver& observer) {
  SolverConfig config;
  config.cfl = cfl;
  return run(initial, model, t_end, config, std::move(output_times), observer);
}

std::vector<SolverState> run(const GridField& initial, const FluxModel& model, double t_end,
                             const SolverConfig& config, std::vector<double> output_times,
                             const StepObserver& observer) {
  if (!std::isfinite(t_end) || !(t_end > 0.0)) throw InputError("run: t_end must be positive");
  if (!std::is_sorted(output_times.begin(), output_times.end())) {
    throw InputError("run: output times must be sorted");
  }
  for (double t : output_times) {
    if (!(t >= 0.0 && t <= t_end)) throw InputError("run: output times must lie in [0, t_end]");
  }
  const bool final_only = output_times.empty();
  if (final_only) output_times.push_back(t_end);

  std::vector<SolverState> snapshots;
  SolverState state = initial_state(initial, config.cfl, config.flux);
  std::size_t next_out = 0;
  auto emit_due = [&] {
    while (next_out < output_times.size() && output_times[next_out] <= state.t) {
      snapshots.push_back(state);
      ++next_out;
    }
  };
  emit_due();

  while (state.t < t_end) {
    const double target = next_out < output_times.size() ? output_times[next_out] : t_end;
    const double remaining = target - state.t;
    const double dt = stable_dt(state, model, remaining);
    const bool lands = dt >= remaining;
    state = step(state, model, lands ? remaining : dt, remaining);
    if (lands) state.t = target;
    if (observer) observer(state);
    emit_due();
  }
  return snapshots;
}

std::vector<double> momentum_field(const SolverState& state, const FluxModel& model) {
  const auto u = state.field.u_faces();
  std::vector<double> q(state.field.n_cells());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = model.A(u[i + 1]) - model.A(u[i]);
  return q;
}

}  // namespace dualflow
