#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "korteweg/workbench.hpp"

using namespace korteweg;
namespace fs = std::filesystem;

namespace {

const char* kSmallRun = R"({
  "model": "euler_korteweg",
  "params": {"gamma": 2.0, "s": -1.0, "epsilon": 0.5},
  "grid": {"n": 32, "length": 6.283185307179586},
  "controls": {"t_end": 0.1},
  "initial": {"type": "sine_perturbation", "mode": 1, "amplitude": 0.2, "base_rho": 1.0},
  "checkpoints": 4
})";

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::path("wb_out") / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(KORTEWEG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("run directories carry the full artifact set") {
  const fs::path out = fresh_dir("artifacts");
  const ScenarioConfig cfg = parse_scenario(kSmallRun);
  const Trajectory tr = execute_scenario(cfg, (out / "run").string());
  REQUIRE(tr.status == RunStatus::ok);
  CHECK(fs::exists(out / "run" / "manifest.json"));
  CHECK(fs::exists(out / "run" / "series.csv"));
  CHECK(fs::exists(out / "run" / "summary.json"));
  CHECK(fs::exists(out / "run" / "snapshots" / "0000.csv"));

  const std::string series = slurp(out / "run" / "series.csv");
  const std::string header =
      "t,dt,E_kinetic,E_internal,E_capillary,E_total,dissipation_cum,rho_min,rho_max,"
      "drift_consistency,mass";
  CHECK(series.substr(0, header.size()) == header);
}

TEST_CASE("identical configs produce byte-identical artifacts") {
  const fs::path out = fresh_dir("determinism");
  const ScenarioConfig cfg = parse_scenario(kSmallRun);
  execute_scenario(cfg, (out / "a").string());
  execute_scenario(cfg, (out / "b").string());
  CHECK(slurp(out / "a" / "series.csv") == slurp(out / "b" / "series.csv"));
  CHECK(slurp(out / "a" / "snapshots" / "0004.csv") == slurp(out / "b" / "snapshots" / "0004.csv"));
}

TEST_CASE("run directories load back exactly") {
  const fs::path out = fresh_dir("roundtrip");
  const ScenarioConfig cfg = parse_scenario(kSmallRun);
  const Trajectory a = execute_scenario(cfg, (out / "run").string());
  REQUIRE(a.status == RunStatus::ok);

  ScenarioConfig echoed;
  const Trajectory b = load_run_dir((out / "run").string(), &echoed);
  CHECK(echoed.n == cfg.n);
  CHECK(echoed.params.gamma == cfg.params.gamma);
  CHECK(echoed.checkpoint_count == cfg.checkpoint_count);
  REQUIRE(a.times.size() == b.times.size());
  for (size_t k = 0; k < a.times.size(); ++k) {
    CHECK(a.times[k] == b.times[k]);
    CHECK(norm_linf(a.states[k].rho - b.states[k].rho) == 0.0);
    CHECK(norm_linf(a.states[k].vel - b.states[k].vel) == 0.0);
    CHECK(norm_linf(a.states[k].drift - b.states[k].drift) == 0.0);
  }
  CHECK(a.total_steps == b.total_steps);
  CHECK(load_run_dir((out / "run").string(), nullptr).size() == a.size());

  CHECK_THROWS(load_run_dir((out / "missing").string(), nullptr));
}

TEST_CASE("run command maps failures onto exit codes") {
  CHECK(run_command("/nonexistent/config.json", "") == exit_config_error);

  // A floor above the initial density minimum trips the vacuum abort, and the
  // aborted run is still persisted with its status.
  const fs::path out = fresh_dir("vacuum");
  spit(out / "cfg.json", R"({
    "model": "euler_korteweg",
    "params": {"gamma": 2.0, "s": -1.0, "epsilon": 0.5},
    "grid": {"n": 32, "length": 6.283185307179586},
    "controls": {"t_end": 0.1, "vacuum_floor": 0.9},
    "initial": {"type": "sine_perturbation", "mode": 1, "amplitude": 0.2, "base_rho": 1.0},
    "checkpoints": 2
  })");
  CHECK(run_command((out / "cfg.json").string(), (out / "run").string()) == exit_vacuum_abort);
  const std::string manifest = slurp(out / "run" / "manifest.json");
  CHECK(manifest.find("vacuum_abort") != std::string::npos);
}

TEST_CASE("comparison of a run against itself certifies trivially") {
  const fs::path out = fresh_dir("self_compare");
  const ScenarioConfig cfg = parse_scenario(kSmallRun);
  execute_scenario(cfg, (out / "run").string());

  const int code = compare_command((out / "run").string(), (out / "run").string(), "euk",
                                   (out / "cmp").string());
  CHECK(code == exit_ok);
  const std::string cert = slurp(out / "cmp" / "certificate.json");
  CHECK(cert.find("\"satisfied\": true") != std::string::npos);
  CHECK(fs::exists(out / "cmp" / "entropy.csv"));
}

TEST_CASE("comparison rejects incompatible pairings") {
  const fs::path out = fresh_dir("incompatible");
  const ScenarioConfig cfg = parse_scenario(kSmallRun);
  execute_scenario(cfg, (out / "run").string());

  // Different thermodynamics.
  ScenarioConfig other = cfg;
  other.params.gamma = 3.0;
  other.params.s = 0.0;
  execute_scenario(other, (out / "other").string());
  CHECK(compare_command((out / "run").string(), (out / "other").string(), "euk",
                        (out / "c1").string()) == exit_incompatible);

  // The dissipative functional needs a dissipative candidate.
  CHECK(compare_command((out / "run").string(), (out / "run").string(), "nsk",
                        (out / "c2").string()) == exit_incompatible);

  // Unknown functional name is a config error.
  CHECK(compare_command((out / "run").string(), (out / "run").string(), "banana",
                        (out / "c3").string()) == exit_config_error);
}

TEST_CASE("sweep command completes on a small spec") {
  const fs::path out = fresh_dir("sweep");
  spit(out / "sweep.json", R"({
    "base": {
      "model": "nsk",
      "params": {"gamma": 2.0, "s": -1.0, "epsilon": 0.5, "nu": 0.2},
      "grid": {"n": 32, "length": 6.283185307179586},
      "controls": {"t_end": 0.05},
      "initial": {"type": "sine_perturbation", "mode": 1, "amplitude": 0.2, "base_rho": 1.0},
      "checkpoints": 2
    },
    "nu_values": [0.2, 0.1],
    "limit_run": {
      "model": "euler_korteweg",
      "params": {"gamma": 2.0, "s": -1.0, "epsilon": 0.5},
      "grid": {"n": 32, "length": 6.283185307179586},
      "controls": {"t_end": 0.05},
      "initial": {"type": "sine_perturbation", "mode": 1, "amplitude": 0.2, "base_rho": 1.0},
      "checkpoints": 2
    }
  })");
  CHECK(sweep_command((out / "sweep.json").string(), (out / "runs").string()) == exit_ok);
  CHECK(fs::exists(out / "runs" / "summary.json"));
}

TEST_CASE("lemma command completes on a small spec") {
  const fs::path out = fresh_dir("lemmas");
  spit(out / "lemmas.json", R"({
    "region": {"n_samples": 500},
    "pairs": [{"gamma": 2.0, "s": -1.0}, {"gamma": 3.0, "s": 0.0}],
    "negative_controls": [{"gamma": 1.5, "s": 1.0}]
  })");
  CHECK(lemmas_command((out / "lemmas.json").string(), (out / "report").string()) == exit_ok);
  CHECK(fs::exists(out / "report" / "lemmas_report.json"));
}

TEST_CASE("worker cap respects the environment override") {
  setenv("KORTEWEG_THREADS", "7", 1);
  CHECK(max_parallel_workers() == 7);
  setenv("KORTEWEG_THREADS", "junk", 1);
  CHECK(max_parallel_workers() >= 1);
  unsetenv("KORTEWEG_THREADS");
  CHECK(max_parallel_workers() >= 1);
}

TEST_CASE("command line binary exposes the same exit codes") {
  CHECK(run_cli("") != 0);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("run /nonexistent/config.json") == exit_config_error);
  CHECK(run_cli("frobnicate x") != 0);
}
