// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "dualflow/analysis.hpp"
#include "dualflow/commands.hpp"
#include "dualflow/particle_solver.hpp"
#include "dualflow/pde_solver.hpp"
#include "dualflow/scenario.hpp"

using namespace dualflow;
using Clock = std::chrono::steady_clock;

namespace {

const FluxModel kAttractive = FluxModel::quadratic_attractive();
const FluxModel kRepulsive = FluxModel::quadratic_repulsive();

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

GridField atoms_on(GridSpec g, std::vector<Atom> atoms) {
  return sample_to_grid(AtomicMeasure::from_atoms(std::move(atoms)), g);
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<Scenario> bundled_scenarios() {
  std::vector<std::filesystem::path> paths;
  for (const auto& e : std::filesystem::directory_iterator(DUALFLOW_SCENARIO_DIR))
    if (e.path().extension() == ".json") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  std::vector<Scenario> out;
  for (const auto& p : paths) out.push_back(load_scenario(p));
  return out;
}

Outcome single_dirac() {
  Outcome o;
  const auto t0 = Clock::now();
  GridSpec g{-3.0, 1.0, 800};
  auto out = run(atoms_on(g, {{0.0, 1.0}}), kAttractive, 1.0, 0.45, {});
  auto atoms = extract_atoms(out[0].field);
  o.require(atoms.size() == 1, fmt("pde atoms=%g", static_cast<double>(atoms.size())));
  if (!atoms.empty()) o.require(std::abs(atoms[0].x + 0.5) <= 2 * g.dx(), fmt("pde x=%.6f (tol %.3g)", atoms[0].x, 2 * g.dx()));

  AggregateSystem sys(AtomicMeasure::from_atoms({{0.0, 1.0}}), kAttractive);
  advance(sys, 1.0);
  o.require(std::abs(sys.positions()[0] + 0.5) <= 1e-12, fmt("particle x=%.15g", sys.positions()[0]));
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, fmt("runtime %.3fs", secs));
  return o;
}

Outcome two_atom_merge() {
  Outcome o;
  const std::vector<Atom> atoms = {{-0.25, 0.5}, {0.25, 0.5}};
  AggregateSystem sys(AtomicMeasure::from_atoms(atoms), kAttractive);
  auto log = advance(sys, 0.5);
  auto at_half = sys.measure();
  auto rest = advance(sys, 2.0);
  log.insert(log.end(), rest.begin(), rest.end());
  o.require(log.size() == 1 && log[0].groups.size() == 1, "one merge event");
  if (!log.empty() && !log[0].groups.empty()) {
    o.require(std::abs(log[0].t - 1.0) <= 1e-12, fmt("merge t=%.15g", log[0].t));
    o.require(std::abs(log[0].groups[0].x + 0.5) <= 1e-12, fmt("merge x=%.15g", log[0].groups[0].x));
  }

  GridSpec g{-3.0, 1.0, 800};
  auto out = run(atoms_on(g, atoms), kAttractive, 2.0, 0.45, {0.5, 2.0});
  auto merged = extract_atoms(out[1].field);
  o.require(merged.size() == 1, fmt("pde atoms at t=2: %g", static_cast<double>(merged.size())));
  if (!merged.empty()) {
    o.require(std::abs(merged[0].x + 1.0) <= 2 * g.dx(), fmt("pde x=%.6f", merged[0].x));
    o.require(std::abs(merged[0].m - 1.0) <= 0.02, fmt("pde m=%.4f (tol 0.02)", merged[0].m));
  }
  const double w_half = wasserstein1(out[0].field, at_half);
  const double w_two = wasserstein1(out[1].field, sys.measure());
  o.require(w_half <= 3 * g.dx(), fmt("W1(t=0.5)=%.5f", w_half));
  o.require(w_two <= 3 * g.dx(), fmt("W1(t=2)=%.5f (bound %.3g)", w_two, 3 * g.dx()));
  return o;
}

Outcome three_atom_collapse() {
  Outcome o;
  const auto mu = AtomicMeasure::from_atoms({{-1.0, 1.0 / 3}, {0.0, 1.0 / 3}, {1.0, 1.0 / 3}});
  AggregateSystem sys(mu, kAttractive);
  const double tc = collapse_time(sys);
  o.require(std::abs(tc - 3.0) <= 1e-12, fmt("collapse_time=%.15g", tc));
  const double com0 = sys.center_of_mass();
  const double slope = kAttractive.A(1.0) - kAttractive.A(0.0);
  double worst = 0.0;
  for (int k = 1; k <= 400; ++k) {
    const double t = 4.0 * k / 400;
    advance(sys, t);
    worst = std::max(worst, std::abs(sys.center_of_mass() - (com0 + slope * t)));
  }
  o.require(worst <= 1e-12, fmt("max COM deviation %.3g", worst));
  AggregateSystem at3(mu, kAttractive);
  advance(at3, 3.0);
  o.require(at3.size() == 1 && std::abs(at3.positions()[0] + 1.5) <= 1e-12,
            fmt("final x=%.15g", at3.positions()[0]));
  return o;
}

Outcome oleinik() {
  Outcome o;
  GridSpec g{-1.0, 3.0, 800};
  auto out = run(atoms_on(g, {{0.0, 1.0}}), kRepulsive, 2.0, 0.45, {0.5, 1.0, 2.0});
  for (const auto& s : out) {
    const double rho = max_cell_density(s.field);
    const double l1 = wasserstein1(s.field, Primitive::from_nodes({{0.0, 0.0, 0.0}, {s.t, 1.0, 1.0}}));
    o.require(rho <= 1.0 / s.t + 5 * g.dx(), fmt("t=%g max rho=%.4f (bound %.4f)", s.t, rho, 1.0 / s.t + 5 * g.dx()));
    o.require(l1 <= 5 * g.dx(), fmt("t=%g L1=%.5f", s.t, l1));
  }
  return o;
}

Outcome mass_conservation(const std::vector<Scenario>& scenarios) {
  Outcome o;
  double worst = 0.0;
  std::size_t steps = 0;
  for (const auto& sc : scenarios) {
    const GridField f = sample_to_grid(sc.initial, sc.grid);
    const double M = f.total_mass();
    run(f, sc.flux, sc.t_end, sc.cfl, sc.output_times, [&](const SolverState& s) {
      ++steps;
      double sum = 0.0;
      for (double m : s.field.cell_masses()) sum += m;
      worst = std::max({worst, std::abs(s.field.u_faces().back() - M), std::abs(sum - M)});
    });
  }
  o.require(worst <= 1e-12, fmt("max |u_N - M|, |sum rho - M| = %.3g over %g steps", worst, static_cast<double>(steps)));

  double particle_worst = 0.0;
  std::size_t events = 0;
  for (const auto& sc : scenarios) {
    if (!sc.atomic() || !sc.attractive()) continue;
    const auto& mu = std::get<AtomicMeasure>(sc.initial);
    AggregateSystem sys(mu, sc.flux);
    // masses change only at events, so the final sum covers every event
    events += advance(sys, sc.t_end).size();
    double m = 0.0;
    for (double v : sys.masses()) m += v;
    particle_worst = std::max(particle_worst, std::abs(m - mu.total_mass()));
  }
  o.require(particle_worst <= 4 * std::numeric_limits<double>::epsilon(),
            fmt("particle mass error %.3g across %g events", particle_worst, static_cast<double>(events)));
  return o;
}

Outcome nonuniqueness() {
  Outcome o;
  for (double v : {-0.9, -0.5, -0.1}) {
    auto r = nonuniqueness_demo(kAttractive, 0.0, v, 1.0);
    o.require(r.admissible, fmt("speed %g admissible", v));
    o.require(r.selected == (v == -0.5), fmt(v == -0.5 ? "speed %g selected" : "speed %g not selected", v));
  }
  auto out = nonuniqueness_demo(kAttractive, 0.0, 0.1, 1.0);
  o.require(!out.admissible && !out.selected, "speed 0.1 rejected");
  return o;
}

Outcome convergence(const std::vector<Scenario>& scenarios) {
  Outcome o;
  for (const auto& sc : scenarios) {
    if (sc.name != "single_dirac_attractive" && sc.name != "repulsive_dirac") continue;
    auto rows = convergence_study(sc, {100, 200, 400, 800});
    std::string orders, ratios;
    bool ok = true;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      ok = ok && rows[k].observed_order >= 0.8 && rows[k].residual_ratio >= 1.5;
      orders += fmt(k == 1 ? "%.3f" : ",%.3f", rows[k].observed_order);
      ratios += fmt(k == 1 ? "%.2f" : ",%.2f", rows[k].residual_ratio);
    }
    o.require(ok, sc.name + " orders " + orders + " residual ratios " + ratios);
  }
  return o;
}

Outcome pushforward(const std::vector<Scenario>& scenarios) {
  Outcome o;
  for (const auto& sc : scenarios) {
    if (!sc.attractive()) continue;
    const GridField f0 = sample_to_grid(sc.initial, sc.grid);
    auto snaps = run(f0, sc.flux, sc.t_end, sc.cfl, sc.output_times);
    std::vector<Primitive> sols;
    std::vector<double> times;
    for (const auto& s : snaps) {
      sols.push_back(s.field);
      times.push_back(s.t);
    }
    auto flow = reconstruct_flow(f0, sols, times, sc.flux);
    double worst = 0.0;
    bool ok = true;
    for (const auto& test : pushforward_tests(sc.grid.x_min, sc.grid.x_max)) {
      for (std::size_t k = 0; k < snaps.size(); ++k) {
        // int phi d rho(t): cell masses at cell centres
        double lhs = 0.0;
        for (std::size_t c = 0; c < sc.grid.n_cells; ++c) lhs += snaps[k].field.cell_mass(c) * test.phi(sc.grid.center(c));
        double rhs = 0.0;
        for (double x : flow.positions[k]) rhs += test.phi(x);
        rhs *= f0.total_mass() / static_cast<double>(flow.positions[k].size());
        const double err = std::abs(lhs - rhs);
        const double bound = 5 * sc.grid.dx() * test.lipschitz;
        ok = ok && err <= bound;
        worst = std::max(worst, err / bound);
      }
    }
    o.require(ok, sc.name + fmt(" worst err/bound %.3g", worst));
  }
  return o;
}

Outcome pressureless(const std::vector<Scenario>& scenarios) {
  Outcome o;
  for (const auto& sc : scenarios) {
    if (!sc.attractive()) continue;
    const GridField f0 = sample_to_grid(sc.initial, sc.grid);
    const double M = f0.total_mass();
    const double expected = sc.flux.A(M) - sc.flux.A(0.0);
    auto snaps = run(f0, sc.flux, sc.t_end, sc.cfl, sc.output_times);
    double drift = 0.0;
    std::size_t cells = 0, violations = 0;
    for (const auto& s : snaps) {
      auto q = momentum_field(s, sc.flux);
      double total = 0.0;
      for (double v : q) total += v;
      drift = std::max(drift, std::abs(total - expected));
      auto u = s.field.u_faces();
      for (std::size_t c = 0; c < q.size(); ++c) {
        const double rho = u[c + 1] - u[c];
        if (rho <= 1e-10 * M) continue;
        ++cells;
        const double mean = q[c] / rho;
        // range of a over [u_c, u_{c+1}] by dense sampling
        double lo = INFINITY, hi = -INFINITY;
        for (int j = 0; j <= 64; ++j) {
          const double a = sc.flux.a(u[c] + rho * j / 64.0);
          lo = std::min(lo, a);
          hi = std::max(hi, a);
        }
        const double slack = 1e-9 + 1e-15 * (std::abs(sc.flux.A(u[c])) + std::abs(sc.flux.A(u[c + 1]))) / rho;
        if (mean < lo - slack || mean > hi + slack) ++violations;
      }
    }
    o.require(drift <= 1e-10 && violations == 0,
              sc.name + fmt(" momentum drift %.3g, bracket violations %g of %g cells", drift,
                            static_cast<double>(violations), static_cast<double>(cells)));
  }
  return o;
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  int failures = 0;
  auto report = [&](int id, const char* title, const std::function<Outcome()>& fn) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
  };

  const auto scenarios = bundled_scenarios();
  report(1, "single attractive Dirac moves to -1/2", single_dirac);
  report(2, "two-atom merge", two_atom_merge);
  report(3, "three-atom simultaneous collapse", three_atom_collapse);
  report(4, "repulsive Dirac obeys rho <= 1/t", oleinik);
  report(5, "mass conservation", [&] { return mass_conservation(scenarios); });
  report(6, "non-uniqueness and selection", nonuniqueness);
  report(7, "convergence", [&] { return convergence(scenarios); });
  report(8, "push-forward by the reconstructed flow", [&] { return pushforward(scenarios); });
  report(9, "pressureless momentum", [&] { return pressureless(scenarios); });
  report(10, "suite runtime", [&] {
    Outcome o;
    const double secs = seconds_since(t0);
    o.require(secs < 120.0, fmt("%.2fs", secs));
    return o;
  });
  return failures == 0 ? 0 : 1;
}
