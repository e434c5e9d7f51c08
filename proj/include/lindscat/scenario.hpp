#pragma once

#include <map>
#include <string>

#include "lindscat/capture.hpp"

namespace lindscat {

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FieldSpec {
  std::string preset;            // gaussian | box | coulomb_cut | values
  std::vector<double> params;    // preset parameters
  std::vector<double> values;    // explicit per-site list
  ScalarField build(int sites, double spacing) const;
};

struct Scenario {
  std::string name = "unnamed";
  // [model]
  int sites = 8;
  double spacing = 1.0;
  std::string boundary = "periodic";
  int internal_dim = 1;
  std::vector<double> internal_levels;  // H_int diagonal
  std::string coupling = "position";    // position | spin | mixed | capture | none
  FieldSpec field;                      // coupling profile g
  double coupling_amplitude = 0.15;
  std::string potential = "none";       // none | well | box
  double potential_depth = 0.0;
  double potential_radius = 1.0;
  double potential_center = 0.0;
  // static Zeeman interaction beta B_z(x) S_z (needs internal_dim >= 2)
  double zeeman_beta = 0.0;
  FieldSpec zeeman_field;
  // [schedule]
  double t_first = 2.0;
  double t_max = 6.0;
  int checkpoints = 9;
  std::string spacing_rule = "linear";  // linear | geometric
  double tol = 5e-4;
  bool recurrence_guard = true;
  // [tolerances]
  std::map<std::string, double> tolerances;
  // [outputs]
  bool out_report = true;
  bool out_timeseries = false;
  bool out_sweep = false;
  // top level
  std::uint64_t seed = 1;
  double smooth_t = 0.0;   // 0 = derive from t_max
  double smooth_dt = 0.02;

  LatticeModel build_model() const;
  Mat build_coupling(const LatticeModel& model) const;
  Mat build_coupling(const LatticeModel& model, double amplitude) const;
  Mat build_potential(const LatticeModel& model) const;
  Schedule build_schedule() const;
};

// Documented key/value format with [model], [schedule], [tolerances],
// [outputs] sections; errors carry line numbers and field names.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

// Named presets, expandable without a file.
//   free | position-decoherence | spin-decoherence | capture-well | siegmann-demo
bool is_preset(const std::string& name);
std::string preset_text(const std::string& name);

struct RunResult {
  int exit_code = 0;  // 0 all-pass, 1 theorem verdict failed, 2 non-convergence
  std::string report_json;
  std::map<std::string, std::string> csv_files;  // name -> contents
};

RunResult run_scenario(const Scenario& sc);

// Writes report.json (+ CSVs, + run_meta.txt sidecar with the timestamp) under
// out_dir; returns the exit code.
int run_scenario_to_dir(const Scenario& sc, const std::string& out_dir,
                        const std::string& format);

}  // namespace lindscat
