#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dualflow/flux.hpp"
#include "dualflow/measure.hpp"
#include "dualflow/pde_solver.hpp"

namespace dualflow {

struct DiagnosticRecord {
  std::string name;
  double t = 0.0;
  double value = 0.0;
  double bound = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct DiagnosticsReport {
  std::vector<DiagnosticRecord> checks;

  bool all_pass() const;
  void add(DiagnosticRecord r) { checks.push_back(std::move(r)); }
  void append(const std::vector<DiagnosticRecord>& rs) { checks.insert(checks.end(), rs.begin(), rs.end()); }
};

/// Checks value <= bound + tol.
DiagnosticRecord upper_bound_record(std::string name, double t, double value, double bound, double tol);

struct SpeedRange {
  double low = 0.0;
  double high = 0.0;
  /// Rankine-Hugoniot speed (A(u+) - A(u-)) / (u+ - u-).
  double selected = 0.0;
};

SpeedRange admissible_speed_range(const FluxModel& model, double u_minus, double u_plus);

/// Discrete one-sided Lipschitz bound max (a(u_{i+1}) - a(u_i)) / dx <= 1/t + tol. For the
/// repulsive quadratic model, where a(u) = u makes that slope the density, the max cell density
/// is checked against the same bound as a second record.
std::vector<DiagnosticRecord> check_oleinik(const SolverState& state, const FluxModel& model, double tol);

/// max_i (a(u_{i+1}) - a(u_i)) / dx.
double oleinik_lhs(const GridField& field, const FluxModel& model);
double max_cell_density(const GridField& field);

/// Separable test function psi(t) * phi(x) built from (1 - s^2)^3 bumps.
struct Bump {
  double center = 0.0;
  double radius = 1.0;

  double value(double x) const;
  double derivative(double x) const;
};

struct TimeWindow {
  enum class Shape { Constant, Ramp, Bump };
  Shape shape = Shape::Constant;
  double t0 = 0.0;
  double t1 = 1.0;
  Bump bump;  // used by Shape::Bump

  double value(double t) const;
  double derivative(double t) const;
};

struct TestFamily {
  std::vector<Bump> space;
  std::vector<TimeWindow> time;
};

/// 8 spatial bumps spread over the grid with seeded jitter, and 4 windows on [t0, t1].
TestFamily default_test_family(const GridSpec& grid, double t0, double t1, std::uint64_t seed);

/// Seed from DUALFLOW_SEED when set, else a fixed default.
std::uint64_t diagnostics_seed();

/// max over the family of |int int (u psi' phi + A(u) psi phi') dx dt - [int u phi psi dx]_{t0}^{t1}|,
/// midpoint rule in space and trapezoid rule over the snapshot times. Snapshots share one grid.
double weak_residual(std::span<const SolverState> snapshots, const FluxModel& model,
                     const TestFamily& family);

/// Flow X(t, q) on mass coordinates q: the quantile of the solution at t. X(t, Q0(q)) for the
/// initial quantile Q0 transports rho0 onto rho(t).
struct FlowTable {
  std::vector<double> mass_coords;              // midpoints of n equal mass slices
  std::vector<double> initial;                  // X(0, q)
  std::vector<double> times;
  std::vector<std::vector<double>> positions;   // positions[k][j] = X(times[k], mass_coords[j])
};

/// Refused unless a is non-increasing on [0, total mass].
FlowTable reconstruct_flow(const Primitive& initial, std::span<const Primitive> solutions,
                           std::span<const double> times, const FluxModel& model,
                           std::size_t n_mass = 2000);

/// int phi d(mu): jumps contribute exactly, linear pieces by the midpoint rule.
double integrate(const Primitive& mu, const std::function<double(double)>& phi);

struct PushforwardTest {
  std::string name;
  std::function<double(double)> phi;
  double lipschitz = 1.0;
};

/// x, x^2 and sin x with Lipschitz constants on [x_min, x_max].
std::vector<PushforwardTest> pushforward_tests(double x_min, double x_max);

/// |int phi d(rho(t_k)) - int phi(X(t_k, q)) dq| <= scale * Lip(phi) for every row and test;
/// solutions[k] belongs to flow.times[k].
std::vector<DiagnosticRecord> check_pushforward(const FlowTable& flow, std::span<const Primitive> solutions,
                                                std::span<const PushforwardTest> tests, double scale);

/// Momentum bookkeeping of the pressureless extension: total momentum against A(M) - A(0) to 1e-10
/// and the per-cell mean-value bracket q_i / rho_i in [min a, max a] on [u_i, u_{i+1}] wherever
/// rho_i > mass_floor_fraction * M.
std::vector<DiagnosticRecord> pressureless_check(std::span<const SolverState> snapshots,
                                                 const FluxModel& model,
                                                 double mass_floor_fraction = 1e-10);

/// Sum of q over each extracted cluster.
std::vector<double> cluster_momenta(const SolverState& state, const FluxModel& model,
                                    const ExtractionParams& params = {});

struct NonuniquenessReport {
  SpeedRange range;
  double speed = 0.0;
  bool admissible = false;  // low < speed < high: a duality solution
  bool selected = false;    // speed equals the Rankine-Hugoniot value
  /// Weak residual of the u-equation for the moving-step candidate, sampled exactly.
  double candidate_residual = 0.0;
};

/// Candidate rho = mass * delta at x0 + speed * t. Refused unless a is strictly monotone on [0, mass].
NonuniquenessReport nonuniqueness_demo(const FluxModel& model, double x0, double speed, double t_end,
                                       double mass = 1.0);

enum class WaveType { Shock, Rarefaction, Contact };

struct WavePiece {
  WaveType type = WaveType::Shock;
  double u_from = 0.0;
  double u_to = 0.0;
  double speed_from = 0.0;  // equal to speed_to for shocks and contacts
  double speed_to = 0.0;
};

struct RiemannClassification {
  SpeedRange range;
  std::string wave;  // "shock", "rarefaction", "contact" or "composite"
  std::vector<WavePiece> pieces;
};

/// Entropy wave structure for increasing data u_minus < u_plus from the lower convex envelope of A
/// on a sampled interval.
RiemannClassification classify_riemann(const FluxModel& model, double u_minus, double u_plus,
                                       std::size_t samples = 4096);

std::string_view to_string(WaveType type);

}  // namespace dualflow
