#include "dualflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>

#include "dualflow/errors.hpp"

namespace dualflow {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_attractive(const FluxModel& model, double total_mass, const char* what) {
  if (!model.is_nonincreasing(0.0, total_mass)) {
    throw RefusedError(std::string(what) + ": flow reconstruction needs a non-increasing velocity a");
  }
}

}  // namespace

bool DiagnosticsReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const DiagnosticRecord& r) { return r.pass; });
}

DiagnosticRecord upper_bound_record(std::string name, double t, double value, double bound, double tol) {
  return {std::move(name), t, value, bound, tol, std::isfinite(value) && value <= bound + tol};
}

SpeedRange admissible_speed_range(const FluxModel& model, double u_minus, double u_plus) {
  if (!std::isfinite(u_minus) || !std::isfinite(u_plus)) throw InputError("admissible_speed_range: non-finite state");
  if (!(u_minus < u_plus)) throw InputError("admissible_speed_range: need u_minus < u_plus");
  const double am = model.a(u_minus);
  const double ap = model.a(u_plus);
  return {std::min(am, ap), std::max(am, ap), (model.A(u_plus) - model.A(u_minus)) / (u_plus - u_minus)};
}

double oleinik_lhs(const GridField& field, const FluxModel& model) {
  const auto u = field.u_faces();
  double best = -std::numeric_limits<double>::infinity();
  double a_prev = model.a(u[0]);
  for (std::size_t i = 1; i < u.size(); ++i) {
    const double a_next = model.a(u[i]);
    best = std::max(best, (a_next - a_prev) / field.dx());
    a_prev = a_next;
  }
  return best;
}

double max_cell_density(const GridField& field) {
  double best = 0.0;
  for (std::size_t i = 0; i < field.n_cells(); ++i) best = std::max(best, field.cell_density(i));
  return best;
}

std::vector<DiagnosticRecord> check_oleinik(const SolverState& state, const FluxModel& model, double tol) {
  if (!(state.t > 0.0)) throw InputError("check_oleinik: the bound 1/t needs t > 0");
  std::vector<DiagnosticRecord> out;
  const double bound = 1.0 / state.t;
  out.push_back(upper_bound_record("oleinik_slope", state.t, oleinik_lhs(state.field, model), bound, tol));
  if (model.kind() == FluxKind::QuadraticRepulsive) {
    out.push_back(upper_bound_record("oleinik_density", state.t, max_cell_density(state.field), bound, tol));
  }
  return out;
}

double Bump::value(double x) const {
  const double s = (x - center) / radius;
  if (std::abs(s) >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  return w * w * w;
}

double Bump::derivative(double x) const {
  const double s = (x - center) / radius;
  if (std::abs(s) >= 1.0) return 0.0;
  const double w = 1.0 - s * s;
  return -6.0 * s * w * w / radius;
}

double TimeWindow::value(double t) const {
  switch (shape) {
    case Shape::Constant:
      return 1.0;
    case Shape::Ramp:
      return (t - t0) / (t1 - t0);
    case Shape::Bump:
      return bump.value(t);
  }
  return 0.0;
}

double TimeWindow::derivative(double t) const {
  switch (shape) {
    case Shape::Constant:
      return 0.0;
    case Shape::Ramp:
      return 1.0 / (t1 - t0);
    case Shape::Bump:
      return bump.derivative(t);
  }
  return 0.0;
}

TestFamily default_test_family(const GridSpec& grid, double t0, double t1, std::uint64_t seed) {
  grid.validate();
  if (!(t1 > t0)) throw InputError("test family: need t0 < t1");
  TestFamily fam;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  const double spacing = (grid.x_max - grid.x_min) / 9.0;
  for (int k = 1; k <= 8; ++k) {
    const double c = grid.x_min + k * spacing + jitter(rng) * spacing;
    const double room = std::min(c - grid.x_min, grid.x_max - c);
    fam.space.push_back({c, std::min(1.5 * spacing, 0.99 * room)});
  }
  const double mid = 0.5 * (t0 + t1);
  const double half = 0.5 * (t1 - t0);
  using Shape = TimeWindow::Shape;
  fam.time.push_back({Shape::Constant, t0, t1, {}});
  fam.time.push_back({Shape::Ramp, t0, t1, {}});
  fam.time.push_back({Shape::Bump, t0, t1, {mid, half}});
  fam.time.push_back({Shape::Bump, t0, t1, {mid, 0.5 * half}});
  return fam;
}

std::uint64_t diagnostics_seed() {
  if (const char* s = std::getenv("DUALFLOW_SEED")) {
    char* end = nullptr;
    const auto v = std::strtoull(s, &end, 10);
    if (end != s && *end == '\0') return v;
  }
  return 20090101ULL;
}

double weak_residual(std::span<const SolverState> snapshots, const FluxModel& model,
                     const TestFamily& family) {
  if (snapshots.size() < 2) throw InputError("weak_residual: need at least two snapshots");
  const GridSpec& grid = snapshots.front().field.grid();
  for (const auto& s : snapshots) {
    const GridSpec& g = s.field.grid();
    if (g.n_cells != grid.n_cells || g.x_min != grid.x_min || g.x_max != grid.x_max) {
      throw InputError("weak_residual: snapshots must share one grid");
    }
  }
  for (std::size_t k = 1; k < snapshots.size(); ++k) {
    if (!(snapshots[k].t > snapshots[k - 1].t)) throw InputError("weak_residual: snapshot times must increase");
  }
  for (const Bump& b : family.space) {
    if (!(b.center - b.radius > grid.x_min && b.center + b.radius < grid.x_max)) {
      throw InputError("weak_residual: test function support touches the domain boundary");
    }
  }

  const std::size_t nk = snapshots.size();
  const std::size_t nj = family.space.size();
  const double dx = grid.dx();
  // iu[k][j] = int u phi_j dx, ia[k][j] = int A(u) phi_j' dx at snapshot k
  std::vector<std::vector<double>> iu(nk, std::vector<double>(nj, 0.0));
  std::vector<std::vector<double>> ia(nk, std::vector<double>(nj, 0.0));
  for (std::size_t k = 0; k < nk; ++k) {
    const auto u = snapshots[k].field.u_faces();
    for (std::size_t j = 0; j < nj; ++j) {
      const Bump& b = family.space[j];
      const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor((b.center - b.radius - grid.x_min) / dx)));
      const auto hi = std::min(grid.n_cells, static_cast<std::size_t>(std::ceil((b.center + b.radius - grid.x_min) / dx)) + 1);
      double su = 0.0;
      double sa = 0.0;
      for (std::size_t c = lo; c < hi; ++c) {
        const double xc = grid.center(c);
        const double ubar = 0.5 * (u[c] + u[c + 1]);
        su += ubar * b.value(xc);
        sa += model.A(ubar) * b.derivative(xc);
      }
      iu[k][j] = su * dx;
      ia[k][j] = sa * dx;
    }
  }

  double worst = 0.0;
  for (const TimeWindow& w : family.time) {
    for (std::size_t j = 0; j < nj; ++j) {
      double r = 0.0;
      for (std::size_t k = 0; k + 1 < nk; ++k) {
        const double ta = snapshots[k].t;
        const double tb = snapshots[k + 1].t;
        const double ga = iu[k][j] * w.derivative(ta) + ia[k][j] * w.value(ta);
        const double gb = iu[k + 1][j] * w.derivative(tb) + ia[k + 1][j] * w.value(tb);
        r += 0.5 * (tb - ta) * (ga + gb);
      }
      r -= iu[nk - 1][j] * w.value(snapshots[nk - 1].t) - iu[0][j] * w.value(snapshots[0].t);
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

FlowTable reconstruct_flow(const Primitive& initial, std::span<const Primitive> solutions,
                           std::span<const double> times, const FluxModel& model, std::size_t n_mass) {
  require_attractive(model, initial.total_mass(), "reconstruct_flow");
  if (solutions.size() != times.size()) throw InputError("reconstruct_flow: one time per solution");
  if (n_mass == 0) throw InputError("reconstruct_flow: need at least one mass coordinate");
  const double total = initial.total_mass();
  FlowTable flow;
  for (std::size_t j = 0; j < n_mass; ++j) {
    flow.mass_coords.push_back((static_cast<double>(j) + 0.5) * total / static_cast<double>(n_mass));
  }
  for (double q : flow.mass_coords) flow.initial.push_back(quantile(initial, q));
  for (std::size_t k = 0; k < solutions.size(); ++k) {
    if (std::abs(solutions[k].total_mass() - total) > 1e-10) {
      throw InputError("reconstruct_flow: solution mass differs from the initial mass");
    }
    flow.times.push_back(times[k]);
    std::vector<double> row;
    row.reserve(n_mass);
    for (double q : flow.mass_coords) row.push_back(quantile(solutions[k], q));
    flow.positions.push_back(std::move(row));
  }
  return flow;
}

double integrate(const Primitive& mu, const std::function<double(double)>& phi) {
  const auto& nodes = mu.nodes();
  double s = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].right != nodes[i].left) s += (nodes[i].right - nodes[i].left) * phi(nodes[i].x);
    if (i + 1 < nodes.size()) {
      const double m = nodes[i + 1].left - nodes[i].right;
      if (m != 0.0) s += m * phi(0.5 * (nodes[i].x + nodes[i + 1].x));
    }
  }
  return s;
}

std::vector<PushforwardTest> pushforward_tests(double x_min, double x_max) {
  const double r = std::max(std::abs(x_min), std::abs(x_max));
  return {
      {"x", [](double x) { return x; }, 1.0},
      {"x2", [](double x) { return x * x; }, 2.0 * r},
      {"sin", [](double x) { return std::sin(x); }, 1.0},
  };
}

std::vector<DiagnosticRecord> check_pushforward(const FlowTable& flow, std::span<const Primitive> solutions,
                                                std::span<const PushforwardTest> tests, double scale) {
  if (solutions.size() != flow.times.size()) throw InputError("check_pushforward: one solution per flow row");
  std::vector<DiagnosticRecord> out;
  const double dq = flow.mass_coords.empty() ? 0.0 : 2.0 * flow.mass_coords.front();
  for (std::size_t k = 0; k < solutions.size(); ++k) {
    for (const auto& test : tests) {
      const double direct = integrate(solutions[k], test.phi);
      double transported = 0.0;
      for (double x : flow.positions[k]) transported += test.phi(x);
      transported *= dq;
      out.push_back(upper_bound_record("pushforward_" + test.name, flow.times[k],
                                       std::abs(direct - transported), scale * test.lipschitz, 0.0));
    }
  }
  return out;
}

std::vector<DiagnosticRecord> pressureless_check(std::span<const SolverState> snapshots,
                                                 const FluxModel& model, double mass_floor_fraction) {
  std::vector<DiagnosticRecord> out;
  for (const auto& s : snapshots) {
    const GridField& f = s.field;
    const double total = f.total_mass();
    const auto q = momentum_field(s, model);
    double sum = 0.0;
    for (double v : q) sum += v;
    out.push_back(upper_bound_record("pressureless_total_momentum", s.t,
                                     std::abs(sum - (model.A(total) - model.A(0.0))), 0.0, 1e-10));

    const auto u = f.u_faces();
    const double floor = mass_floor_fraction * total;
    std::size_t violations = 0;
    for (std::size_t i = 0; i < f.n_cells(); ++i) {
      const double rho = f.cell_mass(i);
      if (!(rho > floor)) continue;
      const double lo = model.min_a(u[i], u[i + 1]);
      const double hi = model.max_a(u[i], u[i + 1]);
      // roundoff in the differences A(u_{i+1}) - A(u_i) and u_{i+1} - u_i, amplified by 1/rho
      const double slack = 16.0 * kEps *
                           (std::abs(model.A(u[i])) + std::abs(model.A(u[i + 1])) +
                            (std::abs(u[i]) + std::abs(u[i + 1])) * std::max(std::abs(lo), std::abs(hi))) /
                           rho;
      const double ratio = q[i] / rho;
      if (ratio < lo - slack || ratio > hi + slack) ++violations;
    }
    out.push_back(upper_bound_record("pressureless_bracket", s.t, static_cast<double>(violations), 0.0, 0.0));
  }
  return out;
}

std::vector<double> cluster_momenta(const SolverState& state, const FluxModel& model,
                                    const ExtractionParams& params) {
  const auto q = momentum_field(state, model);
  std::vector<double> out;
  for (const Cluster& c : extract_clusters(state.field, params.mass_fraction * state.field.total_mass(),
                                           params.width_cells)) {
    double s = 0.0;
    for (std::size_t i = c.first_cell; i <= c.last_cell; ++i) s += q[i];
    out.push_back(s);
  }
  return out;
}

NonuniquenessReport nonuniqueness_demo(const FluxModel& model, double x0, double speed, double t_end,
                                       double mass) {
  if (!std::isfinite(x0) || !std::isfinite(speed) || !(t_end > 0.0) || !(mass > 0.0)) {
    throw InputError("nonuniqueness_demo: need finite x0 and speed, t_end > 0, mass > 0");
  }
  if (!model.is_strictly_decreasing(0.0, mass) && !model.is_strictly_increasing(0.0, mass)) {
    throw RefusedError("nonuniqueness_demo: a must be strictly monotone on [0, mass]");
  }
  NonuniquenessReport rep;
  rep.range = admissible_speed_range(model, 0.0, mass);
  rep.speed = speed;
  rep.admissible = rep.range.low < speed && speed < rep.range.high;
  rep.selected = std::abs(speed - rep.range.selected) <= 1e-12 * std::max(1.0, std::abs(rep.range.selected));

  const double x_end = x0 + speed * t_end;
  const double margin = std::max(1.0, std::abs(speed) * t_end);
  const GridSpec grid{std::min(x0, x_end) - margin, std::max(x0, x_end) + margin, 1000};
  std::vector<SolverState> snaps;
  constexpr int kSamples = 200;
  for (int k = 0; k <= kSamples; ++k) {
    const double t = t_end * k / kSamples;
    auto atoms = AtomicMeasure::from_atoms({{x0 + speed * t, mass}});
    snaps.push_back(SolverState{t, sample_to_grid(atoms, grid), SolverConfig{}.cfl, 0, false});
  }
  rep.candidate_residual =
      weak_residual(snaps, model, default_test_family(grid, 0.0, t_end, diagnostics_seed()));
  return rep;
}

std::string_view to_string(WaveType type) {
  switch (type) {
    case WaveType::Shock:
      return "shock";
    case WaveType::Rarefaction:
      return "rarefaction";
    case WaveType::Contact:
      return "contact";
  }
  return "unknown";
}

RiemannClassification classify_riemann(const FluxModel& model, double u_minus, double u_plus,
                                       std::size_t samples) {
  RiemannClassification out;
  out.range = admissible_speed_range(model, u_minus, u_plus);
  if (samples < 2) throw InputError("classify_riemann: need at least two samples");

  std::vector<double> us(samples + 1);
  std::vector<double> as(samples + 1);
  double scale = 1.0;
  for (std::size_t k = 0; k <= samples; ++k) {
    us[k] = k == samples ? u_plus : u_minus + (u_plus - u_minus) * static_cast<double>(k) / static_cast<double>(samples);
    as[k] = model.A(us[k]);
    scale = std::max(scale, std::abs(as[k]));
  }
  const double tol = 1e-12 * scale;

  // lower convex envelope, collinear points kept
  std::vector<std::size_t> hull;
  for (std::size_t k = 0; k <= samples; ++k) {
    while (hull.size() >= 2) {
      const std::size_t o = hull[hull.size() - 2];
      const std::size_t p = hull.back();
      const double cross = (us[p] - us[o]) * (as[k] - as[o]) - (as[p] - as[o]) * (us[k] - us[o]);
      if (cross < -tol * (us[k] - us[o])) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(k);
  }

  auto push = [&](WavePiece piece) {
    if (!out.pieces.empty()) {
      WavePiece& last = out.pieces.back();
      const bool same_shock = piece.type != WaveType::Rarefaction && last.type == piece.type &&
                              std::abs(last.speed_to - piece.speed_from) <= 1e-9 * std::max(1.0, std::abs(piece.speed_from));
      if ((piece.type == WaveType::Rarefaction && last.type == WaveType::Rarefaction) || same_shock) {
        last.u_to = piece.u_to;
        last.speed_to = piece.speed_to;
        return;
      }
    }
    out.pieces.push_back(piece);
  };

  for (std::size_t h = 0; h + 1 < hull.size(); ++h) {
    const std::size_t i = hull[h];
    const std::size_t j = hull[h + 1];
    const double slope = (as[j] - as[i]) / (us[j] - us[i]);
    if (j == i + 1) {
      const double ai = model.a(us[i]);
      const double aj = model.a(us[j]);
      const bool flat = std::abs(aj - ai) <= 1e-12 * std::max(1.0, std::abs(ai));
      push({flat ? WaveType::Contact : WaveType::Rarefaction, us[i], us[j], flat ? slope : ai, flat ? slope : aj});
      continue;
    }
    double gap = 0.0;
    for (std::size_t k = i + 1; k < j; ++k) gap = std::max(gap, as[k] - (as[i] + slope * (us[k] - us[i])));
    const WaveType type = gap > tol ? WaveType::Shock : WaveType::Contact;
    push({type, us[i], us[j], slope, slope});
  }

  const auto all = [&](WaveType t) {
    return std::all_of(out.pieces.begin(), out.pieces.end(), [t](const WavePiece& p) { return p.type == t; });
  };
  if (all(WaveType::Shock)) {
    out.wave = "shock";
  } else if (all(WaveType::Rarefaction)) {
    out.wave = "rarefaction";
  } else if (all(WaveType::Contact)) {
    out.wave = "contact";
  } else {
    out.wave = "composite";
  }
  return out;
}

}  // namespace dualflow
