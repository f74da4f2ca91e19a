#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <string>

#include "dualflow/commands.hpp"
#include "dualflow/errors.hpp"
#include "dualflow/scenario.hpp"

using namespace dualflow;
using nlohmann::json;

namespace {

json base() {
  return json::parse(R"({
    "name": "t",
    "flux": {"kind": "quadratic-attractive"},
    "initial": {"atoms": [{"x": 0.0, "m": 1.0}]},
    "grid": {"x_min": -3.0, "x_max": 1.0, "n_cells": 100},
    "time": {"t_end": 1.0}
  })");
}

// The error message of parse_scenario(doc), or "" when it parses.
std::string failure(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const ScenarioError& e) {
    return e.what();
  }
  return "";
}

bool mentions(const std::string& msg, const std::string& field) { return msg.find(field) != std::string::npos; }

}  // namespace

TEST_CASE("minimal scenario fills defaults") {
  Scenario s = parse_scenario(base());
  CHECK(s.name == "t");
  CHECK(s.atomic());
  CHECK(s.attractive());
  CHECK(s.cfl == 0.45);
  REQUIRE(s.output_times.size() == 1);
  CHECK(s.output_times[0] == 1.0);
  CHECK(s.grid.n_cells == 100);
  CHECK(s.tol.mass == 1e-12);
  CHECK(s.tol.momentum == 1e-10);
  CHECK(s.wants("oracle"));
  CHECK(default_engine(s) == Engine::Both);
}

TEST_CASE("every flux kind parses") {
  json d = base();
  d["flux"] = {{"kind", "quadratic-repulsive"}};
  CHECK_FALSE(parse_scenario(d).attractive());
  CHECK(default_engine(parse_scenario(d)) == Engine::Pde);

  d["flux"] = json::parse(R"({"kind": "polynomial", "coeffs": [0.5, -1.0]})");
  CHECK(parse_scenario(d).flux.a(1.0) == -0.5);

  d["flux"] = json::parse(R"({"kind": "piecewise-linear-a", "knots": [[0, 0], [1, -2]]})");
  CHECK(parse_scenario(d).flux.a(0.5) == -1.0);
}

TEST_CASE("densities parse") {
  json d = base();
  d["initial"] = json::parse(R"({"density": {"kind": "uniform", "lo": -0.5, "hi": 0.5, "mass": 2.0}})");
  Scenario s = parse_scenario(d);
  CHECK_FALSE(s.atomic());
  CHECK(total_mass(s.initial) == 2.0);
  CHECK(default_engine(s) == Engine::Pde);
  d["initial"] = json::parse(R"({"density": {"kind": "triangular", "center": 0, "half_width": 0.5, "mass": 1}})");
  CHECK(std::holds_alternative<TriangularDensity>(parse_scenario(d).initial));
}

TEST_CASE("unknown fields are rejected by name") {
  json d = base();
  d["grdi"] = 1;
  CHECK(mentions(failure(d), "grdi"));

  d = base();
  d["grid"]["ncells"] = 10;
  CHECK(mentions(failure(d), "grid.ncells"));

  d = base();
  d["diagnostics"] = json::parse(R"({"tolerances": {"mas": 1e-9}})");
  CHECK(mentions(failure(d), "diagnostics.tolerances.mas"));

  d = base();
  d["initial"]["atoms"][0]["mass"] = 1.0;
  CHECK(mentions(failure(d), "initial.atoms[0].mass"));

  d = base();
  d["flux"]["coeffs"] = json::array({1.0});
  CHECK(mentions(failure(d), "flux"));

  d = base();
  d["diagnostics"] = json::parse(R"({"checks": ["oleinik", "olenik"]})");
  CHECK(mentions(failure(d), "olenik"));
}

TEST_CASE("malformed values name the field") {
  auto with = [](const char* ptr, json value) {
    json d = base();
    d[json::json_pointer(ptr)] = std::move(value);
    return failure(d);
  };
  CHECK(mentions(with("/grid/n_cells", 0), "grid.n_cells"));
  CHECK(mentions(with("/grid/n_cells", 10.5), "grid.n_cells"));
  CHECK(mentions(with("/grid/x_max", -4.0), "grid.x_max"));
  CHECK(mentions(with("/time/t_end", 0.0), "time.t_end"));
  CHECK(mentions(with("/time/cfl", 1.5), "time.cfl"));
  CHECK(mentions(with("/time/output_times", json::array({0.5, 0.2})), "time.output_times"));
  CHECK(mentions(with("/time/output_times", json::array({2.0})), "time.output_times"));
  CHECK(mentions(with("/initial/atoms/0/m", -1.0), "initial.atoms[0].m"));
  CHECK(mentions(with("/initial/atoms/0/x", "zero"), "initial.atoms[0].x"));
  CHECK(mentions(with("/initial/atoms", json::array()), "initial.atoms"));
  CHECK(mentions(with("/initial/atoms/0/x", 5.0), "initial"));
  CHECK(mentions(with("/flux/kind", "cubic"), "flux.kind"));
  CHECK(mentions(with("/output/formats", json::array({"xml"})), "output.formats"));

  json d = base();
  d.erase("grid");
  CHECK(mentions(failure(d), "grid"));
  d = base();
  d["initial"]["density"] = json::parse(R"({"kind": "uniform", "lo": 0, "hi": 1, "mass": 1})");
  CHECK(mentions(failure(d), "initial"));
  d = base();
  d["initial"] = json::parse(R"({"density": {"kind": 3}})");
  CHECK(mentions(failure(d), "initial.density.kind"));
}

TEST_CASE("tolerances override defaults") {
  json d = base();
  d["diagnostics"] = json::parse(R"({"checks": ["oracle"], "tolerances": {"oracle_factor": 1.5}})");
  Scenario s = parse_scenario(d);
  CHECK(s.tol.oracle_factor == 1.5);
  CHECK(s.wants("oracle"));
  CHECK_FALSE(s.wants("oleinik"));
}

TEST_CASE("loading from disk") {
  const auto dir = std::filesystem::temp_directory_path() / "dualflow_test_scenario";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "bad.json") << "{ not json";
  }
  CHECK_THROWS_AS(load_scenario(dir / "bad.json"), ScenarioError);
  CHECK_THROWS_AS(load_scenario(dir / "missing.json"), ScenarioError);
  for (const auto& entry : std::filesystem::directory_iterator(DUALFLOW_SCENARIO_DIR)) {
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_scenario(entry.path()));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("resolution lists") {
  CHECK(parse_resolutions("100,200,400") == std::vector<std::size_t>{100, 200, 400});
  CHECK_THROWS(parse_resolutions("100,,200"));
  CHECK_THROWS(parse_resolutions("100,-2"));
  CHECK(parse_engine("pde") == Engine::Pde);
  CHECK_THROWS(parse_engine("fluid"));
}
