#include "dualflow/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "dualflow/errors.hpp"

namespace dualflow {
namespace {

using nlohmann::json;

void only_fields(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ScenarioError(where + ": expected an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ScenarioError("unknown field '" + where + "." + key + "'");
    }
  }
}

const json& need(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ScenarioError("missing field '" + where + "." + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ScenarioError("field '" + field + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ScenarioError("field '" + field + "' must be finite");
  return d;
}

double positive(const json& v, const std::string& field) {
  const double d = number(v, field);
  if (!(d > 0.0)) throw ScenarioError("field '" + field + "' must be positive");
  return d;
}

std::vector<double> numbers(const json& v, const std::string& field) {
  if (!v.is_array()) throw ScenarioError("field '" + field + "' must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], field + "[" + std::to_string(i) + "]"));
  return out;
}

InitialData initial_from_json(const json& block) {
  only_fields(block, "initial", {"atoms", "density"});
  if (block.contains("atoms") == block.contains("density")) {
    throw ScenarioError("field 'initial' needs exactly one of 'atoms' or 'density'");
  }
  if (block.contains("atoms")) {
    const json& arr = block.at("atoms");
    if (!arr.is_array()) throw ScenarioError("field 'initial.atoms' must be an array");
    if (arr.empty()) throw ScenarioError("field 'initial.atoms' is empty (total mass must be positive)");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string where = "initial.atoms[" + std::to_string(i) + "]";
      only_fields(arr[i], where, {"x", "m"});
      atoms.push_back({number(need(arr[i], where, "x"), where + ".x"), positive(need(arr[i], where, "m"), where + ".m")});
    }
    return AtomicMeasure::from_atoms(std::move(atoms));
  }
  const json& d = block.at("density");
  const json& k = need(d, "initial.density", "kind");
  if (!k.is_string()) throw ScenarioError("field 'initial.density.kind' must be a string");
  const std::string kind = k.get<std::string>();
  if (kind == "uniform") {
    only_fields(d, "initial.density", {"kind", "lo", "hi", "mass"});
    UniformDensity u{number(need(d, "initial.density", "lo"), "initial.density.lo"),
                     number(need(d, "initial.density", "hi"), "initial.density.hi"),
                     positive(need(d, "initial.density", "mass"), "initial.density.mass")};
    if (!(u.hi > u.lo)) throw ScenarioError("field 'initial.density.hi' must exceed 'lo'");
    return u;
  }
  if (kind == "triangular") {
    only_fields(d, "initial.density", {"kind", "center", "half_width", "mass"});
    return TriangularDensity{number(need(d, "initial.density", "center"), "initial.density.center"),
                             positive(need(d, "initial.density", "half_width"), "initial.density.half_width"),
                             positive(need(d, "initial.density", "mass"), "initial.density.mass")};
  }
  throw ScenarioError("field 'initial.density.kind' must be 'uniform' or 'triangular'");
}

Tolerances tolerances_from_json(const json& block) {
  Tolerances t;
  only_fields(block, "diagnostics.tolerances",
              {"mass", "momentum", "oleinik_factor", "pushforward_factor", "oracle_factor",
               "weak_residual_factor", "center_of_mass"});
  auto read = [&](const char* key, double& dst) {
    if (block.contains(key)) dst = positive(block.at(key), std::string("diagnostics.tolerances.") + key);
  };
  read("mass", t.mass);
  read("momentum", t.momentum);
  read("oleinik_factor", t.oleinik_factor);
  read("pushforward_factor", t.pushforward_factor);
  read("oracle_factor", t.oracle_factor);
  read("weak_residual_factor", t.weak_residual_factor);
  read("center_of_mass", t.center_of_mass);
  return t;
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"mass_conservation", "oleinik",     "weak_residual",
                                              "pushforward",       "pressureless", "oracle",
                                              "center_of_mass",    "domain"};
  return names;
}

bool Scenario::wants(const std::string& check) const {
  return checks.empty() || std::find(checks.begin(), checks.end(), check) != checks.end();
}

FluxModel flux_from_json(const json& block, const std::string& where) {
  only_fields(block, where, {"kind", "coeffs", "knots"});
  const json& k = need(block, where, "kind");
  if (!k.is_string()) throw ScenarioError("field '" + where + ".kind' must be a string");
  FluxKind kind;
  try {
    kind = parse_flux_kind(k.get<std::string>());
  } catch (const InputError& e) {
    throw ScenarioError("field '" + where + ".kind': " + e.what());
  }
  switch (kind) {
    case FluxKind::QuadraticAttractive:
    case FluxKind::QuadraticRepulsive:
      if (block.contains("coeffs") || block.contains("knots")) {
        throw ScenarioError("field '" + where + "': quadratic models take no coefficients");
      }
      return kind == FluxKind::QuadraticAttractive ? FluxModel::quadratic_attractive()
                                                   : FluxModel::quadratic_repulsive();
    case FluxKind::Polynomial:
      if (block.contains("knots")) throw ScenarioError("unknown field '" + where + ".knots' for polynomial flux");
      return FluxModel::polynomial(numbers(need(block, where, "coeffs"), where + ".coeffs"));
    case FluxKind::PiecewiseLinearA: {
      if (block.contains("coeffs")) throw ScenarioError("unknown field '" + where + ".coeffs' for piecewise-linear-a flux");
      const json& arr = need(block, where, "knots");
      if (!arr.is_array()) throw ScenarioError("field '" + where + ".knots' must be an array of [u, a] pairs");
      std::vector<Knot> knots;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto pair = numbers(arr[i], where + ".knots[" + std::to_string(i) + "]");
        if (pair.size() != 2) throw ScenarioError("field '" + where + ".knots[" + std::to_string(i) + "]' must be [u, a]");
        knots.push_back({pair[0], pair[1]});
      }
      try {
        return FluxModel::piecewise_linear(std::move(knots));
      } catch (const InputError& e) {
        throw ScenarioError("field '" + where + ".knots': " + e.what());
      }
    }
  }
  throw ScenarioError("field '" + where + ".kind': unsupported");
}

Scenario parse_scenario(const json& doc) {
  only_fields(doc, "scenario", {"name", "flux", "initial", "grid", "time", "diagnostics", "output"});
  Scenario s;
  s.source = doc;
  if (doc.contains("name")) {
    if (!doc.at("name").is_string()) throw ScenarioError("field 'name' must be a string");
    s.name = doc.at("name").get<std::string>();
  }
  s.flux_block = need(doc, "scenario", "flux");
  s.flux = flux_from_json(s.flux_block);
  try {
    s.initial = initial_from_json(need(doc, "scenario", "initial"));
  } catch (const InputError& e) {
    throw ScenarioError(std::string("field 'initial': ") + e.what());
  }

  const json& g = need(doc, "scenario", "grid");
  only_fields(g, "grid", {"x_min", "x_max", "n_cells"});
  s.grid.x_min = number(need(g, "grid", "x_min"), "grid.x_min");
  s.grid.x_max = number(need(g, "grid", "x_max"), "grid.x_max");
  const json& n = need(g, "grid", "n_cells");
  if (!n.is_number_integer() || n.get<long long>() <= 0) throw ScenarioError("field 'grid.n_cells' must be a positive integer");
  s.grid.n_cells = n.get<std::size_t>();
  if (!(s.grid.x_max > s.grid.x_min)) throw ScenarioError("field 'grid.x_max' must exceed 'grid.x_min'");

  const json& t = need(doc, "scenario", "time");
  only_fields(t, "time", {"t_end", "cfl", "output_times"});
  s.t_end = positive(need(t, "time", "t_end"), "time.t_end");
  if (t.contains("cfl")) {
    s.cfl = positive(t.at("cfl"), "time.cfl");
    if (s.cfl > 1.0) throw ScenarioError("field 'time.cfl' must lie in (0, 1]");
  }
  s.output_times = t.contains("output_times") ? numbers(t.at("output_times"), "time.output_times")
                                              : std::vector<double>{s.t_end};
  if (!std::is_sorted(s.output_times.begin(), s.output_times.end())) {
    throw ScenarioError("field 'time.output_times' must be sorted");
  }
  for (double v : s.output_times) {
    if (v < 0.0 || v > s.t_end) throw ScenarioError("field 'time.output_times' must lie in [0, t_end]");
  }

  if (doc.contains("diagnostics")) {
    const json& d = doc.at("diagnostics");
    only_fields(d, "diagnostics", {"checks", "tolerances"});
    if (d.contains("checks")) {
      if (!d.at("checks").is_array()) throw ScenarioError("field 'diagnostics.checks' must be an array");
      for (const auto& c : d.at("checks")) {
        if (!c.is_string()) throw ScenarioError("field 'diagnostics.checks' must hold strings");
        const auto name = c.get<std::string>();
        if (std::find(known_checks().begin(), known_checks().end(), name) == known_checks().end()) {
          throw ScenarioError("field 'diagnostics.checks': unknown check '" + name + "'");
        }
        s.checks.push_back(name);
      }
    }
    if (d.contains("tolerances")) s.tol = tolerances_from_json(d.at("tolerances"));
  }

  if (doc.contains("output")) {
    const json& o = doc.at("output");
    only_fields(o, "output", {"directory", "formats"});
    if (o.contains("directory")) {
      if (!o.at("directory").is_string()) throw ScenarioError("field 'output.directory' must be a string");
      s.output_directory = o.at("directory").get<std::string>();
    }
    if (o.contains("formats")) {
      if (!o.at("formats").is_array()) throw ScenarioError("field 'output.formats' must be an array");
      s.formats.clear();
      for (const auto& f : o.at("formats")) {
        if (!f.is_string() || (f != "csv" && f != "json")) {
          throw ScenarioError("field 'output.formats' entries must be 'csv' or 'json'");
        }
        s.formats.push_back(f.get<std::string>());
      }
    }
  }

  try {
    sample_to_grid(s.initial, s.grid);
  } catch (const DomainError& e) {
    throw ScenarioError(std::string("field 'initial': ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot read scenario file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ScenarioError("scenario '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

}  // namespace dualflow
