#include <iostream>

#include <CLI11.hpp>

#include "lindscat/scenario.hpp"
#include "lindscat/verify.hpp"

using namespace lindscat;

namespace {

Scenario scenario_from_arg(const std::string& arg) {
  Scenario sc = is_preset(arg) ? parse_scenario(preset_text(arg)) : load_scenario_file(arg);
  return sc;
}

void apply_overrides(Scenario& sc, double t_max, double dt, double tol, long long seed) {
  if (t_max > 0) sc.t_max = t_max;
  if (dt > 0) sc.smooth_dt = dt;
  if (tol > 0) sc.tol = tol;
  if (seed >= 0) sc.seed = static_cast<std::uint64_t>(seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lindscat: dissipative scattering laboratory for Lindblad dynamics"};
  app.require_subcommand(1);

  std::string scenario_arg, out_dir = "out", format = "json", subset = "all";
  double t_max = -1, dt = -1, tol = -1;
  long long seed = -1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("scenario", scenario_arg, "scenario file or preset name")->required();
    cmd->add_option("--t-max", t_max, "override schedule t_max");
    cmd->add_option("--dt", dt, "override quadrature step");
    cmd->add_option("--tol", tol, "override plateau tolerance");
    cmd->add_option("--seed", seed, "override RNG seed");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--format", format, "json | json+csv");
  };

  CLI::App* run_cmd = app.add_subcommand("run", "run the full pipeline for a scenario");
  add_common(run_cmd);

  CLI::App* smooth_cmd =
      app.add_subcommand("smoothness", "measure smoothness constants for a scenario");
  add_common(smooth_cmd);

  CLI::App* wave_cmd =
      app.add_subcommand("wave-op", "compute wave-operator limits for a scenario");
  add_common(wave_cmd);

  CLI::App* capture_cmd =
      app.add_subcommand("capture", "run the capture pipeline (sweep) for a scenario");
  add_common(capture_cmd);

  CLI::App* verify_cmd = app.add_subcommand("verify", "run the acceptance suites");
  verify_cmd->add_option("subset", subset, "all | qds | dissipative | lindblad | capture")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify_cmd->parsed()) {
      const int failures = verify(subset, std::cout);
      std::cout << (failures == 0 ? "ALL PASS" : "FAILURES: ") << (failures ? std::to_string(failures) : "")
                << std::endl;
      return failures == 0 ? 0 : 1;
    }
    Scenario sc = scenario_from_arg(scenario_arg);
    apply_overrides(sc, t_max, dt, tol, seed);
    if (smooth_cmd->parsed()) {
      sc.out_timeseries = false;
      sc.out_sweep = false;
    }
    if (wave_cmd->parsed()) sc.out_timeseries = true;
    if (capture_cmd->parsed()) sc.out_sweep = true;
    const int code = run_scenario_to_dir(sc, out_dir, format);
    std::cout << "report written to " << out_dir << "/report.json (exit " << code << ")"
              << std::endl;
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
}
