#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dualflow/commands.hpp"
#include "dualflow/errors.hpp"
#include "dualflow/scenario.hpp"

int main(int argc, char** argv) {
  using namespace dualflow;
  CLI::App app{"dualflow: entropy-selected solutions of the aggregation system d_t rho + d_x(a(u) rho) = 0"};
  app.require_subcommand(1);

  std::string scenario;
  std::string engine;
  std::string out;
  std::string resolutions = "100,200,400,800";
  std::string flux_text;
  double u_minus = 0.0;
  double u_plus = 1.0;

  auto* run = app.add_subcommand("run", "Run the PDE and/or particle engine and write CSV/JSON outputs");
  run->add_option("--scenario", scenario, "Scenario JSON file")->required();
  run->add_option("--engine", engine, "pde, particles or both (default: both when the data is atomic and a is non-increasing, else pde)")->check(CLI::IsMember({"pde", "particles", "both"}));
  run->add_option("--out", out, "Output directory (overrides output.directory)");

  auto* validate = app.add_subcommand("validate", "Run every applicable diagnostic; exit 0 iff all pass");
  validate->add_option("--scenario", scenario, "Scenario JSON file")->required();
  validate->add_option("--out", out, "Directory for report.json");

  auto* conv = app.add_subcommand("convergence", "L1 convergence study over grid resolutions");
  conv->add_option("--scenario", scenario, "Scenario JSON file")->required();
  conv->add_option("--resolutions", resolutions, "Comma-separated cell counts");
  conv->add_option("--out", out, "Directory for convergence.csv");

  auto* riemann = app.add_subcommand("riemann", "Admissible speeds and entropy wave structure of a Riemann problem");
  riemann->add_option("--flux", flux_text, "Flux block as JSON, e.g. {\"kind\":\"quadratic-attractive\"}");
  riemann->add_option("--scenario", scenario, "Take the flux block from this scenario");
  riemann->add_option("--u-minus", u_minus, "Left state");
  riemann->add_option("--u-plus", u_plus, "Right state");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const auto out_dir = out.empty() ? std::nullopt : std::optional<std::filesystem::path>(out);
  try {
    if (*run) {
      const auto eng = engine.empty() ? std::nullopt : std::optional<Engine>(parse_engine(engine));
      return cmd_run(scenario, eng, out_dir, std::cout, std::cerr);
    }
    if (*validate) return cmd_validate(scenario, out_dir, std::cout, std::cerr);
    if (*conv) return cmd_convergence(scenario, parse_resolutions(resolutions), out_dir, std::cout, std::cerr);
    if (*riemann) {
      nlohmann::json flux;
      if (!flux_text.empty()) {
        flux = nlohmann::json::parse(flux_text);
      } else if (!scenario.empty()) {
        flux = load_scenario(scenario).flux_block;
      } else {
        std::cerr << "error: riemann needs --flux or --scenario\n";
        return kExitConfig;
      }
      return cmd_riemann(flux, u_minus, u_plus, std::cout, std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitConfig;
}
