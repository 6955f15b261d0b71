#pragma once

#include <string>

#include "korteweg/diagnostics.hpp"
#include "korteweg/scenario.hpp"

namespace korteweg {

// Process exit codes shared by the CLI and the tests that drive it.
enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,  // evaluated assertion failed (sweep monotonicity, lemma suite, certificate)
  exit_config_error = 2,
  exit_vacuum_abort = 3,
  exit_consistency_abort = 4,
  exit_nonfinite_abort = 5,
  exit_incompatible = 6,
};

int exit_code_for(RunStatus s);

// Simulates the scenario and persists the run directory:
//   manifest.json              self-describing record (config echo, status, snapshot table)
//   series.csv                 one row per recorded snapshot
//   snapshots/NNNN.csv         the recorded fields
//   summary.json               headline numbers
// The directory is written even for aborted runs (status lands in the
// manifest).  Returns the trajectory for in-process consumers.
Trajectory execute_scenario(const ScenarioConfig& cfg, const std::string& out_dir);

// Inverse of execute_scenario; numbers round-trip exactly.
Trajectory load_run_dir(const std::string& dir, ScenarioConfig* cfg_out = nullptr);

// Worker cap for sweep parallelism: KORTEWEG_THREADS when set, else the
// hardware concurrency, always at least 1.
int max_parallel_workers();

// CLI drivers.  Each returns a process exit code; out_override (when
// nonempty) replaces the config's output_dir.
int run_command(const std::string& config_path, const std::string& out_override);
int sweep_command(const std::string& config_path, const std::string& out_override);
int compare_command(const std::string& candidate_dir, const std::string& reference_path,
                    const std::string& functional_name, const std::string& out_override);
int lemmas_command(const std::string& config_path, const std::string& out_override);

}  // namespace korteweg
