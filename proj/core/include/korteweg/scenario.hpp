#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "korteweg/lemma_suite.hpp"
#include "korteweg/reference.hpp"

namespace korteweg {

// Raised for every malformed, unknown, missing or inconsistent config entry;
// the CLI maps it to the config-error exit code.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct InitialSpec {
  enum class Kind { constant, gaussian_bump, sine_perturbation };
  Kind kind = Kind::constant;
  // constant
  double rho0 = 1.0;
  double u0 = 0.0;
  // gaussian_bump: base + amplitude * periodic bump of the given width
  double amplitude = 0.0;
  double width = 1.0;
  double base = 1.0;
  // sine_perturbation: base_rho + amplitude * sin(2 pi mode x / L), u = base_u
  int mode = 1;
  double base_rho = 1.0;
  double base_u = 0.0;

  void validate() const;
};

struct ReferenceSpec {
  enum class Kind { none, manufactured, high_resolution };
  Kind kind = Kind::none;
  TravelingWaveSpec wave;  // manufactured
  int factor = 4;          // high_resolution refinement, one of {2, 4, 8}

  void validate() const;
};

// Everything needed to reproduce one simulation.  Serializes to and from a
// strict JSON tree: unknown keys are errors.
struct ScenarioConfig {
  ModelKind model = ModelKind::euler_korteweg;
  ModelParams params;
  int n = 256;
  double length = 2.0 * Grid::pi();
  TimeControls controls;
  InitialSpec initial;
  ReferenceSpec reference;
  std::string output_dir;
  // Comparison grid: this many uniform intervals in [0, t_end], each endpoint
  // landed on exactly.
  int checkpoint_count = 32;
  // Calibrated prefactor of the certificate constant estimate; frozen here so
  // certificates are reproducible, not tuned per run.
  double gronwall_c0 = 2.0;

  void validate() const;
};

struct SweepConfig {
  ScenarioConfig base;              // model = nsk; nu taken from nu_values
  std::vector<double> nu_values;    // strictly decreasing, each in (0, eps)
  ScenarioConfig limit_run;         // model = euler_korteweg, same eps, nu = 0
  std::string output_dir;

  void validate() const;
};

struct LemmaPair {
  double gamma = 2.0;
  double s = -1.0;
};

struct LemmaSuiteConfig {
  SampleRegion region;
  std::vector<LemmaPair> pairs;
  std::vector<LemmaPair> negative_controls;
  std::string output_dir;

  void validate() const;
};

ScenarioConfig parse_scenario(const std::string& json_text);
std::string scenario_to_json(const ScenarioConfig& cfg);
ScenarioConfig load_scenario_file(const std::string& path);

SweepConfig parse_sweep(const std::string& json_text);
SweepConfig load_sweep_file(const std::string& path);

LemmaSuiteConfig parse_lemma_config(const std::string& json_text);
LemmaSuiteConfig load_lemma_config_file(const std::string& path);

// Initial state on the scenario grid; the drift component is derived from the
// density so the shadow invariant holds at t = 0 by construction.
State build_initial(const ScenarioConfig& cfg);

GridPtr build_grid(const ScenarioConfig& cfg);

// Checkpoint-furnished copy of the scenario controls (uniform checkpoint_count
// intervals merged into controls.checkpoints).
TimeControls controls_with_checkpoints(const ScenarioConfig& cfg);

// Reference realization for compare-style diagnostics: a closed-form
// traveling wave on the scenario grid, or a refined rerun of the same
// scenario (factor x resolution) restricted back onto it.
std::unique_ptr<ReferenceSolution> build_reference(const ScenarioConfig& cfg);

}  // namespace korteweg
