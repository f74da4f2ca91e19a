#include "dualflow/commands.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "dualflow/errors.hpp"
#include "dualflow/io.hpp"

namespace dualflow {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kDenseSamples = 200;

bool has_particles(Engine e) { return e != Engine::Pde; }
bool has_pde(Engine e) { return e != Engine::Particles; }

std::vector<double> evenly_spaced(double t_end, std::size_t intervals) {
  std::vector<double> ts;
  for (std::size_t k = 0; k <= intervals; ++k) {
    ts.push_back(k == intervals ? t_end : t_end * static_cast<double>(k) / static_cast<double>(intervals));
  }
  return ts;
}

std::vector<double> merged_times(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> all(a);
  all.insert(all.end(), b.begin(), b.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

Primitive initial_primitive(const Scenario& s) {
  if (const auto* atoms = std::get_if<AtomicMeasure>(&s.initial)) return Primitive(*atoms);
  return Primitive(sample_to_grid(s.initial, s.grid));
}

// Weak residual over the samples with t <= t_stop, using windows on [0, t_stop].
double residual_up_to(const std::vector<SolverState>& samples, const Scenario& s, double t_stop) {
  std::vector<SolverState> part;
  for (const auto& st : samples) {
    if (st.t <= t_stop) part.push_back(st);
  }
  if (part.size() < 2 || !(t_stop > part.front().t)) return 0.0;
  const auto family = default_test_family(s.grid, part.front().t, t_stop, diagnostics_seed());
  return weak_residual(part, s.flux, family);
}

void run_pde(const Scenario& s, Evaluation& ev) {
  const GridField g0 = sample_to_grid(s.initial, s.grid);
  const double total = g0.total_mass();
  const auto all_times = merged_times(s.output_times, evenly_spaced(s.t_end, kDenseSamples));

  auto mass_error = [&](const GridField& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < f.n_cells(); ++i) sum += f.cell_mass(i);
    return std::max({std::abs(f.u_faces().back() - total), std::abs(f.u_faces().front()), std::abs(sum - total)});
  };
  ev.max_mass_error = mass_error(g0);
  const auto snaps = run(g0, s.flux, s.t_end, s.cfl, all_times, [&](const SolverState& st) {
    ev.max_mass_error = std::max(ev.max_mass_error, mass_error(st.field));
    ev.boundary_touched = ev.boundary_touched || st.boundary_touched;
  });
  ev.pde_dense = snaps;
  for (double t : s.output_times) {
    const auto k = static_cast<std::size_t>(std::lower_bound(all_times.begin(), all_times.end(), t) - all_times.begin());
    ev.pde_outputs.push_back(snaps[k]);
  }

  auto& rep = ev.report;
  const double dx = s.grid.dx();
  if (s.wants("mass_conservation")) {
    rep.add(upper_bound_record("mass_conservation", s.t_end, ev.max_mass_error, 0.0, s.tol.mass));
  }
  if (s.wants("domain")) {
    rep.add(upper_bound_record("domain", s.t_end, ev.boundary_touched ? 1.0 : 0.0, 0.0, 0.0));
  }
  if (s.wants("oleinik")) {
    for (const auto& st : ev.pde_outputs) {
      if (st.t > 0.0) rep.append(check_oleinik(st, s.flux, s.tol.oleinik_factor * dx));
    }
  }
  if (s.wants("weak_residual")) {
    rep.add(upper_bound_record("weak_residual", s.t_end, residual_up_to(ev.pde_dense, s, s.t_end),
                               s.tol.weak_residual_factor * dx, 0.0));
  }
  if (s.wants("pressureless")) rep.append(pressureless_check(ev.pde_outputs, s.flux));
  if (s.wants("pushforward") && s.attractive()) {
    std::vector<Primitive> sols;
    std::vector<double> times;
    for (const auto& st : ev.pde_outputs) {
      sols.emplace_back(st.field);
      times.push_back(st.t);
    }
    const auto flow = reconstruct_flow(initial_primitive(s), sols, times, s.flux);
    const auto tests = pushforward_tests(s.grid.x_min, s.grid.x_max);
    rep.append(check_pushforward(flow, sols, tests, s.tol.pushforward_factor * dx));
  }
}

void run_particles(const Scenario& s, Evaluation& ev) {
  const auto* atoms = std::get_if<AtomicMeasure>(&s.initial);
  if (atoms == nullptr) throw RefusedError("the particle engine needs atomic initial data");
  AggregateSystem sys(*atoms, s.flux);
  const double total = sys.total_mass();
  const double com0 = sys.center_of_mass();
  const double slope = s.flux.A(total) - s.flux.A(0.0);
  double com_err = 0.0;
  double mass_err = 0.0;
  double last_recorded = -1.0;

  auto record = [&] {
    for (std::size_t i = 0; i < sys.size(); ++i) {
      ev.trajectory.push_back({sys.time(), sys.ids()[i], sys.positions()[i], sys.masses()[i], sys.velocities()[i]});
    }
    last_recorded = sys.time();
    double m = 0.0;
    for (double mi : sys.masses()) m += mi;
    mass_err = std::max(mass_err, std::abs(m - total));
    com_err = std::max(com_err, std::abs(sys.center_of_mass() - com0 - sys.time() * slope));
  };

  for (double target : s.output_times) {
    while (true) {
      const auto e = next_event(sys);
      if (!e || e->t > target) break;
      for (auto& rec : advance(sys, e->t)) ev.events.push_back(std::move(rec));
      record();
    }
    advance(sys, target);
    if (last_recorded != sys.time()) record();
    ev.particle_outputs.push_back(sys.measure());
  }

  auto& rep = ev.report;
  if (s.wants("mass_conservation")) rep.add(upper_bound_record("particle_mass", sys.time(), mass_err, 0.0, s.tol.mass));
  if (s.wants("center_of_mass")) {
    rep.add(upper_bound_record("center_of_mass", sys.time(), com_err, 0.0, s.tol.center_of_mass));
  }
}

void compare_engines(const Scenario& s, Evaluation& ev) {
  if (!s.wants("oracle")) return;
  const double dx = s.grid.dx();
  const double speed = s.flux.max_abs_a(0.0, total_mass(s.initial));
  const double dt = speed > 0.0 ? s.cfl * dx / speed : 0.0;
  for (std::size_t k = 0; k < s.output_times.size(); ++k) {
    const double t = s.output_times[k];
    const bool near_merge = std::any_of(ev.events.begin(), ev.events.end(),
                                        [&](const EventRecord& e) { return std::abs(e.t - t) <= 2.0 * dt; });
    if (near_merge) continue;
    const double w = wasserstein1(ev.pde_outputs[k].field, ev.particle_outputs[k]);
    ev.report.add(upper_bound_record("oracle_w1", t, w, s.tol.oracle_factor * dx, 0.0));
  }
}

std::string csv_field(const Evaluation& ev) {
  std::ostringstream os;
  os << "t,x_face,u\n";
  for (const auto& st : ev.pde_outputs) {
    const auto u = st.field.u_faces();
    for (std::size_t i = 0; i < u.size(); ++i) {
      os << format_number(st.t) << ',' << format_number(st.field.grid().face(i)) << ',' << format_number(u[i]) << '\n';
    }
  }
  return os.str();
}

std::string csv_cells(const Evaluation& ev) {
  std::ostringstream os;
  os << "t,x_center,rho_cell_mass,rho_density\n";
  for (const auto& st : ev.pde_outputs) {
    for (std::size_t i = 0; i < st.field.n_cells(); ++i) {
      os << format_number(st.t) << ',' << format_number(st.field.grid().center(i)) << ','
         << format_number(st.field.cell_mass(i)) << ',' << format_number(st.field.cell_density(i)) << '\n';
    }
  }
  return os.str();
}

std::string csv_pde_atoms(const Evaluation& ev) {
  std::ostringstream os;
  os << "t,atom_id,x,m\n";
  for (const auto& st : ev.pde_outputs) {
    const auto atoms = extract_atoms(st.field);
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      os << format_number(st.t) << ',' << i << ',' << format_number(atoms[i].x) << ',' << format_number(atoms[i].m) << '\n';
    }
  }
  return os.str();
}

std::string csv_diagnostics(const Scenario& s, const Evaluation& ev) {
  std::ostringstream os;
  os << "t,total_mass,max_cell_density,oleinik_lhs_max,residual_weak\n";
  for (const auto& st : ev.pde_outputs) {
    double sum = 0.0;
    for (std::size_t i = 0; i < st.field.n_cells(); ++i) sum += st.field.cell_mass(i);
    os << format_number(st.t) << ',' << format_number(sum) << ',' << format_number(max_cell_density(st.field)) << ','
       << format_number(oleinik_lhs(st.field, s.flux)) << ',' << format_number(residual_up_to(ev.pde_dense, s, st.t))
       << '\n';
  }
  return os.str();
}

std::string csv_trajectory(const Evaluation& ev) {
  std::ostringstream os;
  os << "t,atom_id,x,m,v\n";
  for (const auto& r : ev.trajectory) {
    os << format_number(r.t) << ',' << r.id << ',' << format_number(r.x) << ',' << format_number(r.m) << ','
       << format_number(r.v) << '\n';
  }
  return os.str();
}

std::string csv_events(const Evaluation& ev) {
  std::ostringstream os;
  os << "t_event,ids_merged,x,m\n";
  for (const auto& e : ev.events) {
    for (const auto& g : e.groups) {
      os << format_number(e.t) << ',';
      for (std::size_t i = 0; i < g.ids.size(); ++i) os << (i ? ";" : "") << g.ids[i];
      os << ',' << format_number(g.x) << ',' << format_number(g.m) << '\n';
    }
  }
  return os.str();
}

void print_report(const DiagnosticsReport& rep, std::ostream& os) {
  for (const auto& r : rep.checks) {
    os << (r.pass ? "PASS " : "FAIL ") << r.name << " t=" << format_number(r.t) << " value=" << format_number(r.value)
       << " bound=" << format_number(r.bound) << " tol=" << format_number(r.tol) << '\n';
  }
  os << (rep.all_pass() ? "all checks passed" : "some checks FAILED") << " (" << rep.checks.size() << " checks)\n";
}

nlohmann::json scenario_echo(const Scenario& s, Engine engine) {
  nlohmann::json j = s.source;
  j["engine"] = engine == Engine::Pde ? "pde" : engine == Engine::Particles ? "particles" : "both";
  return j;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const RefusedError& e) {
    err << "refused: " << e.what() << '\n';
  } catch (const std::filesystem::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitConfig;
}

}  // namespace

Engine parse_engine(const std::string& name) {
  if (name == "pde") return Engine::Pde;
  if (name == "particles") return Engine::Particles;
  if (name == "both") return Engine::Both;
  throw InputError("unknown engine '" + name + "' (expected pde, particles or both)");
}

Engine default_engine(const Scenario& scenario) {
  return scenario.atomic() && scenario.attractive() ? Engine::Both : Engine::Pde;
}

Evaluation evaluate(const Scenario& scenario, Engine engine) {
  Evaluation ev;
  ev.engine = engine;
  if (has_particles(engine)) {
    if (!scenario.atomic()) throw RefusedError("the particle engine needs atomic initial data");
    if (!scenario.attractive()) {
      throw RefusedError("the particle engine needs a non-increasing velocity a (attractive case); flux '" +
                         std::string(to_string(scenario.flux.kind())) + "' is not");
    }
  }
  if (has_pde(engine)) run_pde(scenario, ev);
  if (has_particles(engine)) run_particles(scenario, ev);
  if (engine == Engine::Both) compare_engines(scenario, ev);
  return ev;
}

std::optional<Primitive> reference_solution(const Scenario& scenario, double t) {
  const auto* atoms = std::get_if<AtomicMeasure>(&scenario.initial);
  if (atoms == nullptr) return std::nullopt;
  if (scenario.attractive()) {
    AggregateSystem sys(*atoms, scenario.flux);
    advance(sys, t);
    return Primitive(sys.measure());
  }
  if (scenario.flux.kind() == FluxKind::QuadraticRepulsive && atoms->size() == 1) {
    const Atom a = atoms->atoms().front();
    if (!(t > 0.0)) return Primitive(*atoms);
    return Primitive::from_nodes({{a.x, 0.0, 0.0}, {a.x + a.m * t, a.m, a.m}});
  }
  return std::nullopt;
}

std::vector<ConvergenceRow> convergence_study(const Scenario& scenario, std::vector<std::size_t> resolutions,
                                              std::size_t time_samples) {
  if (resolutions.size() < 3) throw InputError("convergence: need at least three resolutions");
  std::sort(resolutions.begin(), resolutions.end());
  resolutions.erase(std::unique(resolutions.begin(), resolutions.end()), resolutions.end());
  if (resolutions.size() < 3) throw InputError("convergence: need at least three distinct resolutions");

  const auto times = evenly_spaced(scenario.t_end, time_samples);
  const auto family = default_test_family(scenario.grid, 0.0, scenario.t_end, diagnostics_seed());
  const auto reference = reference_solution(scenario, scenario.t_end);

  struct Result {
    GridField final_field;
    double residual;
  };
  std::vector<std::future<Result>> jobs;
  for (std::size_t n : resolutions) {
    jobs.push_back(std::async(std::launch::async, [&, n] {
      Scenario s = scenario;
      s.grid.n_cells = n;
      const auto snaps = run(sample_to_grid(s.initial, s.grid), s.flux, s.t_end, s.cfl, times);
      return Result{snaps.back().field, weak_residual(snaps, s.flux, family)};
    }));
  }
  std::vector<Result> results;
  for (auto& j : jobs) results.push_back(j.get());

  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < resolutions.size(); ++k) {
    ConvergenceRow r;
    r.n_cells = resolutions[k];
    r.dx = results[k].final_field.dx();
    if (reference) {
      r.l1_error = wasserstein1(results[k].final_field, *reference);
    } else {
      r.l1_error = k + 1 == resolutions.size() ? kNaN : wasserstein1(results[k].final_field, results.back().final_field);
    }
    r.weak_residual = results[k].residual;
    r.observed_order = kNaN;
    r.residual_ratio = kNaN;
    if (k > 0) {
      const double ratio_n = static_cast<double>(resolutions[k]) / static_cast<double>(resolutions[k - 1]);
      r.observed_order = std::log(rows.back().l1_error / r.l1_error) / std::log(ratio_n);
      r.residual_ratio = rows.back().weak_residual / r.weak_residual;
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<std::size_t> parse_resolutions(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(item, &pos);
    } catch (const std::exception&) {
      throw InputError("resolutions: '" + item + "' is not an integer");
    }
    if (pos != item.size() || v <= 0) throw InputError("resolutions: '" + item + "' is not a positive integer");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

int cmd_run(const std::filesystem::path& scenario_path, std::optional<Engine> requested,
            const std::optional<std::filesystem::path>& out, std::ostream& os, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(scenario_path);
    const Engine engine = requested.value_or(default_engine(s));
    const Evaluation ev = evaluate(s, engine);
    const std::filesystem::path dir = out.value_or(s.output_directory);
    const bool csv = std::find(s.formats.begin(), s.formats.end(), "csv") != s.formats.end();
    const bool json = std::find(s.formats.begin(), s.formats.end(), "json") != s.formats.end();
    std::filesystem::create_directories(dir);
    if (csv && has_pde(engine)) {
      write_atomically(dir / "field.csv", csv_field(ev));
      write_atomically(dir / "cells.csv", csv_cells(ev));
      write_atomically(dir / "pde_atoms.csv", csv_pde_atoms(ev));
      write_atomically(dir / "diagnostics.csv", csv_diagnostics(s, ev));
    }
    if (csv && has_particles(engine)) {
      write_atomically(dir / "trajectory.csv", csv_trajectory(ev));
      write_atomically(dir / "events.csv", csv_events(ev));
    }
    if (json) write_atomically(dir / "report.json", report_to_json(ev.report, scenario_echo(s, engine)).dump(2) + "\n");
    if (ev.boundary_touched) err << "warning: waves reached the domain boundary; enlarge the grid\n";
    print_report(ev.report, os);
    return ev.report.all_pass() ? kExitOk : kExitValidation;
  });
}

int cmd_validate(const std::filesystem::path& scenario_path, const std::optional<std::filesystem::path>& out,
                 std::ostream& os, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(scenario_path);
    const Engine engine = default_engine(s);
    const Evaluation ev = evaluate(s, engine);
    if (out) write_atomically(*out / "report.json", report_to_json(ev.report, scenario_echo(s, engine)).dump(2) + "\n");
    print_report(ev.report, os);
    return ev.report.all_pass() ? kExitOk : kExitValidation;
  });
}

int cmd_convergence(const std::filesystem::path& scenario_path, const std::vector<std::size_t>& resolutions,
                    const std::optional<std::filesystem::path>& out, std::ostream& os, std::ostream& err) {
  return guarded(err, [&] {
    const Scenario s = load_scenario(scenario_path);
    const auto rows = convergence_study(s, resolutions);
    std::ostringstream table;
    table << "n_cells,dx,l1_error,observed_order,weak_residual,residual_ratio\n";
    for (const auto& r : rows) {
      table << r.n_cells << ',' << format_number(r.dx) << ',' << format_number(r.l1_error) << ','
            << format_number(r.observed_order) << ',' << format_number(r.weak_residual) << ','
            << format_number(r.residual_ratio) << '\n';
    }
    os << table.str();
    if (out) write_atomically(*out / "convergence.csv", table.str());
    return kExitOk;
  });
}

int cmd_riemann(const nlohmann::json& flux, double u_minus, double u_plus, std::ostream& os, std::ostream& err) {
  return guarded(err, [&] {
    const FluxModel model = flux_from_json(flux);
    const auto c = classify_riemann(model, u_minus, u_plus);
    os << "admissible_speed_range low=" << format_number(c.range.low) << " high=" << format_number(c.range.high)
       << " selected=" << format_number(c.range.selected) << '\n';
    os << "wave " << c.wave << '\n';
    for (const auto& p : c.pieces) {
      os << "  " << to_string(p.type) << " u=[" << format_number(p.u_from) << ", " << format_number(p.u_to) << "]";
      if (p.type == WaveType::Rarefaction) {
        os << " speeds=[" << format_number(p.speed_from) << ", " << format_number(p.speed_to) << "]\n";
      } else {
        os << " speed=" << format_number(p.speed_from) << '\n';
      }
    }
    return kExitOk;
  });
}

}  // namespace dualflow
