#include "korteweg/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace korteweg {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

const json& expect_object(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where + ": expected an object");
  return j;
}

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed) {
      if (it.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) fail(where + ": unknown key '" + it.key() + "'");
  }
}

bool has(const json& obj, const char* key) { return obj.contains(key); }

double get_number(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where + ": missing key '" + std::string(key) + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key + ": expected a number");
  return v.get<double>();
}

double get_number_or(const json& obj, const std::string& where, const char* key, double dflt) {
  return obj.contains(key) ? get_number(obj, where, key) : dflt;
}

int get_int(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where + ": missing key '" + std::string(key) + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer()) fail(where + "." + key + ": expected an integer");
  return v.get<int>();
}

int get_int_or(const json& obj, const std::string& where, const char* key, int dflt) {
  return obj.contains(key) ? get_int(obj, where, key) : dflt;
}

bool get_bool_or(const json& obj, const std::string& where, const char* key, bool dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(where + "." + key + ": expected a boolean");
  return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) fail(where + ": missing key '" + std::string(key) + "'");
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

json parse_text(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(what + ": invalid JSON");
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelParams parse_params(const json& j, const std::string& where) {
  expect_object(j, where);
  check_keys(j, where, {"gamma", "s", "epsilon", "nu"});
  ModelParams p;
  p.gamma = get_number(j, where, "gamma");
  p.s = get_number(j, where, "s");
  p.epsilon = get_number_or(j, where, "epsilon", 0.0);
  p.nu = get_number_or(j, where, "nu", 0.0);
  return p;
}

InitialSpec parse_initial(const json& j, const std::string& where) {
  expect_object(j, where);
  const std::string type = get_string(j, where, "type");
  InitialSpec spec;
  if (type == "constant") {
    check_keys(j, where, {"type", "rho0", "u0"});
    spec.kind = InitialSpec::Kind::constant;
    spec.rho0 = get_number(j, where, "rho0");
    spec.u0 = get_number_or(j, where, "u0", 0.0);
  } else if (type == "gaussian_bump") {
    check_keys(j, where, {"type", "amplitude", "width", "base"});
    spec.kind = InitialSpec::Kind::gaussian_bump;
    spec.amplitude = get_number(j, where, "amplitude");
    spec.width = get_number(j, where, "width");
    spec.base = get_number(j, where, "base");
  } else if (type == "sine_perturbation") {
    check_keys(j, where, {"type", "mode", "amplitude", "base_rho", "base_u"});
    spec.kind = InitialSpec::Kind::sine_perturbation;
    spec.mode = get_int(j, where, "mode");
    spec.amplitude = get_number(j, where, "amplitude");
    spec.base_rho = get_number(j, where, "base_rho");
    spec.base_u = get_number_or(j, where, "base_u", 0.0);
  } else {
    fail(where + ".type: unknown initial data kind '" + type + "'");
  }
  return spec;
}

ReferenceSpec parse_reference(const json& j, const std::string& where) {
  expect_object(j, where);
  const std::string type = get_string(j, where, "type");
  ReferenceSpec spec;
  if (type == "manufactured") {
    check_keys(j, where, {"type", "base", "amplitude", "mode", "speed", "flux"});
    spec.kind = ReferenceSpec::Kind::manufactured;
    spec.wave.base = get_number(j, where, "base");
    spec.wave.amplitude = get_number(j, where, "amplitude");
    spec.wave.mode = get_int_or(j, where, "mode", 1);
    spec.wave.speed = get_number_or(j, where, "speed", 0.0);
    spec.wave.flux = get_number_or(j, where, "flux", 0.0);
  } else if (type == "high_resolution") {
    check_keys(j, where, {"type", "factor"});
    spec.kind = ReferenceSpec::Kind::high_resolution;
    spec.factor = get_int(j, where, "factor");
  } else {
    fail(where + ".type: unknown reference kind '" + type + "'");
  }
  return spec;
}

ScenarioConfig parse_scenario_json(const json& j, const std::string& where) {
  expect_object(j, where);
  check_keys(j, where,
             {"model", "params", "grid", "controls", "initial", "reference", "output_dir",
              "checkpoints", "gronwall_c0"});

  ScenarioConfig cfg;
  try {
    cfg.model = model_from_string(get_string(j, where, "model"));
  } catch (const std::invalid_argument& e) {
    fail(where + ".model: " + e.what());
  }
  cfg.params = parse_params(j.at("params"), where + ".params");

  if (!has(j, "grid")) fail(where + ": missing key 'grid'");
  const json& grid = expect_object(j.at("grid"), where + ".grid");
  check_keys(grid, where + ".grid", {"n", "length"});
  cfg.n = get_int(grid, where + ".grid", "n");
  cfg.length = get_number(grid, where + ".grid", "length");

  if (!has(j, "controls")) fail(where + ": missing key 'controls'");
  const json& ctl = expect_object(j.at("controls"), where + ".controls");
  check_keys(ctl, where + ".controls",
             {"t_end", "cfl_hyperbolic", "cfl_dispersive", "dt_max", "vacuum_floor",
              "record_stride", "dealias"});
  TimeControls defaults;
  cfg.controls.t_end = get_number(ctl, where + ".controls", "t_end");
  cfg.controls.cfl_hyperbolic =
      get_number_or(ctl, where + ".controls", "cfl_hyperbolic", defaults.cfl_hyperbolic);
  cfg.controls.cfl_dispersive =
      get_number_or(ctl, where + ".controls", "cfl_dispersive", defaults.cfl_dispersive);
  cfg.controls.dt_max = get_number_or(ctl, where + ".controls", "dt_max", defaults.dt_max);
  cfg.controls.vacuum_floor =
      get_number_or(ctl, where + ".controls", "vacuum_floor", defaults.vacuum_floor);
  cfg.controls.record_stride =
      get_int_or(ctl, where + ".controls", "record_stride", defaults.record_stride);
  cfg.controls.dealias = get_bool_or(ctl, where + ".controls", "dealias", defaults.dealias);

  if (!has(j, "initial")) fail(where + ": missing key 'initial'");
  cfg.initial = parse_initial(j.at("initial"), where + ".initial");

  if (has(j, "reference")) cfg.reference = parse_reference(j.at("reference"), where + ".reference");
  if (has(j, "output_dir")) cfg.output_dir = get_string(j, where, "output_dir");
  cfg.checkpoint_count = get_int_or(j, where, "checkpoints", cfg.checkpoint_count);
  cfg.gronwall_c0 = get_number_or(j, where, "gronwall_c0", cfg.gronwall_c0);

  cfg.validate();
  return cfg;
}

json initial_to_json(const InitialSpec& s) {
  json j;
  switch (s.kind) {
    case InitialSpec::Kind::constant:
      j["type"] = "constant";
      j["rho0"] = s.rho0;
      j["u0"] = s.u0;
      break;
    case InitialSpec::Kind::gaussian_bump:
      j["type"] = "gaussian_bump";
      j["amplitude"] = s.amplitude;
      j["width"] = s.width;
      j["base"] = s.base;
      break;
    case InitialSpec::Kind::sine_perturbation:
      j["type"] = "sine_perturbation";
      j["mode"] = s.mode;
      j["amplitude"] = s.amplitude;
      j["base_rho"] = s.base_rho;
      j["base_u"] = s.base_u;
      break;
  }
  return j;
}

json scenario_json(const ScenarioConfig& cfg) {
  json j;
  j["model"] = to_string(cfg.model);
  j["params"] = {{"gamma", cfg.params.gamma},
                 {"s", cfg.params.s},
                 {"epsilon", cfg.params.epsilon},
                 {"nu", cfg.params.nu}};
  j["grid"] = {{"n", cfg.n}, {"length", cfg.length}};
  json ctl;
  ctl["t_end"] = cfg.controls.t_end;
  ctl["cfl_hyperbolic"] = cfg.controls.cfl_hyperbolic;
  ctl["cfl_dispersive"] = cfg.controls.cfl_dispersive;
  if (std::isfinite(cfg.controls.dt_max)) ctl["dt_max"] = cfg.controls.dt_max;
  ctl["vacuum_floor"] = cfg.controls.vacuum_floor;
  ctl["record_stride"] = cfg.controls.record_stride;
  ctl["dealias"] = cfg.controls.dealias;
  j["controls"] = ctl;
  j["initial"] = initial_to_json(cfg.initial);
  if (cfg.reference.kind == ReferenceSpec::Kind::manufactured) {
    j["reference"] = {{"type", "manufactured"},     {"base", cfg.reference.wave.base},
                      {"amplitude", cfg.reference.wave.amplitude},
                      {"mode", cfg.reference.wave.mode}, {"speed", cfg.reference.wave.speed},
                      {"flux", cfg.reference.wave.flux}};
  } else if (cfg.reference.kind == ReferenceSpec::Kind::high_resolution) {
    j["reference"] = {{"type", "high_resolution"}, {"factor", cfg.reference.factor}};
  }
  if (!cfg.output_dir.empty()) j["output_dir"] = cfg.output_dir;
  j["checkpoints"] = cfg.checkpoint_count;
  j["gronwall_c0"] = cfg.gronwall_c0;
  return j;
}

}  // namespace

void InitialSpec::validate() const {
  switch (kind) {
    case Kind::constant:
      if (!(rho0 > 0.0)) fail("initial.constant: rho0 must be positive");
      break;
    case Kind::gaussian_bump:
      if (!(base > 0.0)) fail("initial.gaussian_bump: base must be positive");
      if (!(width > 0.0)) fail("initial.gaussian_bump: width must be positive");
      if (!(std::abs(amplitude) < base)) {
        fail("initial.gaussian_bump: need |amplitude| < base to stay clear of vacuum");
      }
      break;
    case Kind::sine_perturbation:
      if (mode < 1) fail("initial.sine_perturbation: mode must be >= 1");
      if (!(base_rho > 0.0)) fail("initial.sine_perturbation: base_rho must be positive");
      if (!(std::abs(amplitude) < base_rho)) {
        fail("initial.sine_perturbation: need |amplitude| < base_rho to stay clear of vacuum");
      }
      break;
  }
}

void ReferenceSpec::validate() const {
  if (kind == Kind::manufactured) {
    if (!(wave.base > 0.0) || !(std::abs(wave.amplitude) < wave.base)) {
      fail("reference.manufactured: need base > 0 and |amplitude| < base");
    }
    if (wave.mode < 1) fail("reference.manufactured: mode must be >= 1");
  } else if (kind == Kind::high_resolution) {
    if (factor != 2 && factor != 4 && factor != 8) {
      fail("reference.high_resolution: factor must be one of {2, 4, 8}");
    }
  }
}

void ScenarioConfig::validate() const {
  try {
    if (model == ModelKind::nsk) {
      params.validate_nsk();
    } else {
      params.validate();
    }
    controls.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (model == ModelKind::quantum_euler_direct && !params.is_quantum()) {
    fail("quantum_euler_direct requires s = -1");
  }
  if (n < 8 || n % 2 != 0) fail("grid.n must be even and >= 8");
  if (!(length > 0.0) || !std::isfinite(length)) fail("grid.length must be positive and finite");
  initial.validate();
  reference.validate();
  if (checkpoint_count < 1) fail("checkpoints must be >= 1");
  if (!(gronwall_c0 > 0.0) || !std::isfinite(gronwall_c0)) {
    fail("gronwall_c0 must be positive and finite");
  }
}

namespace {

bool same_initial(const InitialSpec& a, const InitialSpec& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case InitialSpec::Kind::constant:
      return a.rho0 == b.rho0 && a.u0 == b.u0;
    case InitialSpec::Kind::gaussian_bump:
      return a.amplitude == b.amplitude && a.width == b.width && a.base == b.base;
    case InitialSpec::Kind::sine_perturbation:
      return a.mode == b.mode && a.amplitude == b.amplitude && a.base_rho == b.base_rho &&
             a.base_u == b.base_u;
  }
  return false;
}

}  // namespace

void SweepConfig::validate() const {
  base.validate();
  limit_run.validate();
  if (base.model != ModelKind::nsk) fail("sweep.base.model must be nsk");
  if (limit_run.model != ModelKind::euler_korteweg) {
    fail("sweep.limit_run.model must be euler_korteweg");
  }
  if (limit_run.params.nu != 0.0) fail("sweep.limit_run must have nu = 0");
  if (limit_run.params.epsilon != base.params.epsilon || limit_run.params.gamma != base.params.gamma ||
      limit_run.params.s != base.params.s) {
    fail("sweep.limit_run must share gamma, s and epsilon with the base scenario");
  }
  if (limit_run.n != base.n || limit_run.length != base.length) {
    fail("sweep.limit_run must share the base grid");
  }
  if (!same_initial(limit_run.initial, base.initial)) {
    fail("sweep.limit_run must share the base initial data");
  }
  if (limit_run.controls.t_end != base.controls.t_end ||
      limit_run.checkpoint_count != base.checkpoint_count) {
    fail("sweep.limit_run must share t_end and the checkpoint count");
  }
  if (nu_values.empty()) fail("sweep.nu_values must be nonempty");
  for (size_t i = 0; i < nu_values.size(); ++i) {
    const double nu = nu_values[i];
    if (!(nu > 0.0) || !(nu < base.params.epsilon)) {
      fail("sweep.nu_values: every value must lie in (0, epsilon)");
    }
    if (i > 0 && !(nu < nu_values[i - 1])) {
      fail("sweep.nu_values must be strictly decreasing");
    }
  }
}

void LemmaSuiteConfig::validate() const {
  try {
    region.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (pairs.empty()) fail("lemmas.pairs must be nonempty");
  for (const LemmaPair& p : pairs) {
    ModelParams mp;
    mp.gamma = p.gamma;
    mp.s = p.s;
    try {
      mp.validate();
    } catch (const std::invalid_argument& e) {
      fail(std::string("lemmas.pairs: ") + e.what());
    }
  }
  // Negative controls are allowed to break the hypotheses; that is the point.
}

ScenarioConfig parse_scenario(const std::string& json_text) {
  return parse_scenario_json(parse_text(json_text, "scenario config"), "scenario");
}

std::string scenario_to_json(const ScenarioConfig& cfg) { return scenario_json(cfg).dump(2); }

ScenarioConfig load_scenario_file(const std::string& path) {
  return parse_scenario(read_file(path));
}

SweepConfig parse_sweep(const std::string& json_text) {
  const json j = parse_text(json_text, "sweep config");
  expect_object(j, "sweep");
  check_keys(j, "sweep", {"base", "nu_values", "limit_run", "output_dir"});
  if (!has(j, "base")) fail("sweep: missing key 'base'");
  if (!has(j, "limit_run")) fail("sweep: missing key 'limit_run'");
  if (!has(j, "nu_values")) fail("sweep: missing key 'nu_values'");

  SweepConfig cfg;
  cfg.base = parse_scenario_json(j.at("base"), "sweep.base");
  cfg.limit_run = parse_scenario_json(j.at("limit_run"), "sweep.limit_run");
  const json& nus = j.at("nu_values");
  if (!nus.is_array()) fail("sweep.nu_values: expected an array");
  for (const json& v : nus) {
    if (!v.is_number()) fail("sweep.nu_values: expected numbers");
    cfg.nu_values.push_back(v.get<double>());
  }
  if (has(j, "output_dir")) cfg.output_dir = get_string(j, "sweep", "output_dir");
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_file(const std::string& path) { return parse_sweep(read_file(path)); }

LemmaSuiteConfig parse_lemma_config(const std::string& json_text) {
  const json j = parse_text(json_text, "lemma config");
  expect_object(j, "lemmas");
  check_keys(j, "lemmas", {"region", "pairs", "negative_controls", "output_dir"});

  LemmaSuiteConfig cfg;
  if (has(j, "region")) {
    const json& r = expect_object(j.at("region"), "lemmas.region");
    check_keys(r, "lemmas.region", {"rho_min", "rho_max", "r_min", "r_max", "n_samples", "seed"});
    cfg.region.rho_min = get_number_or(r, "lemmas.region", "rho_min", cfg.region.rho_min);
    cfg.region.rho_max = get_number_or(r, "lemmas.region", "rho_max", cfg.region.rho_max);
    cfg.region.r_min = get_number_or(r, "lemmas.region", "r_min", cfg.region.r_min);
    cfg.region.r_max = get_number_or(r, "lemmas.region", "r_max", cfg.region.r_max);
    cfg.region.n_samples = get_int_or(r, "lemmas.region", "n_samples", cfg.region.n_samples);
    cfg.region.seed = static_cast<unsigned>(get_int_or(r, "lemmas.region", "seed", 0));
  }
  auto parse_pairs = [&](const char* key, std::vector<LemmaPair>& out) {
    if (!has(j, key)) return;
    const json& arr = j.at(key);
    if (!arr.is_array()) fail(std::string("lemmas.") + key + ": expected an array");
    for (const json& e : arr) {
      expect_object(e, std::string("lemmas.") + key + " entry");
      check_keys(e, std::string("lemmas.") + key + " entry", {"gamma", "s"});
      LemmaPair p;
      p.gamma = get_number(e, std::string("lemmas.") + key + " entry", "gamma");
      p.s = get_number(e, std::string("lemmas.") + key + " entry", "s");
      out.push_back(p);
    }
  };
  parse_pairs("pairs", cfg.pairs);
  parse_pairs("negative_controls", cfg.negative_controls);
  if (has(j, "output_dir")) cfg.output_dir = get_string(j, "lemmas", "output_dir");
  cfg.validate();
  return cfg;
}

LemmaSuiteConfig load_lemma_config_file(const std::string& path) {
  return parse_lemma_config(read_file(path));
}

GridPtr build_grid(const ScenarioConfig& cfg) { return make_grid(cfg.n, cfg.length); }

State build_initial(const ScenarioConfig& cfg) {
  const GridPtr g = build_grid(cfg);
  Field rho = Field::zeros(g);
  Field u = Field::zeros(g);
  const double L = cfg.length;
  switch (cfg.initial.kind) {
    case InitialSpec::Kind::constant:
      rho = Field::constant(g, cfg.initial.rho0);
      u = Field::constant(g, cfg.initial.u0);
      break;
    case InitialSpec::Kind::gaussian_bump: {
      // Periodic bump matching exp(-(x-c)^2 / (2 width^2)) near the center.
      const double k = 2.0 * Grid::pi() / L;
      const double c = 0.5 * L;
      const double w2 = cfg.initial.width * cfg.initial.width;
      rho = Field::sample(g, [&](double x) {
        return cfg.initial.base +
               cfg.initial.amplitude * std::exp((std::cos(k * (x - c)) - 1.0) / (k * k * w2));
      });
      break;
    }
    case InitialSpec::Kind::sine_perturbation: {
      const double k = 2.0 * Grid::pi() * cfg.initial.mode / L;
      rho = Field::sample(
          g, [&](double x) { return cfg.initial.base_rho + cfg.initial.amplitude * std::sin(k * x); });
      u = Field::constant(g, cfg.initial.base_u);
      break;
    }
  }

  switch (cfg.model) {
    case ModelKind::euler_korteweg: {
      const Field v = drift_velocity(rho, cfg.params);
      return make_euler_state(rho, u, v);
    }
    case ModelKind::nsk: {
      const Field v = drift_velocity(rho, cfg.params);
      const double eps = cfg.params.epsilon;
      const double nu = cfg.params.nu;
      const Field w = u + nu * v;
      const Field vbar = std::sqrt(eps * eps - nu * nu) * v;
      return make_nsk_state(rho, w, vbar);
    }
    case ModelKind::quantum_euler_direct:
      return make_quantum_state(rho, u);
  }
  throw std::logic_error("unreachable model kind");
}

TimeControls controls_with_checkpoints(const ScenarioConfig& cfg) {
  TimeControls c = cfg.controls;
  c.checkpoints = uniform_checkpoints(c.t_end, cfg.checkpoint_count);
  return c;
}

std::unique_ptr<ReferenceSolution> build_reference(const ScenarioConfig& cfg) {
  switch (cfg.reference.kind) {
    case ReferenceSpec::Kind::none:
      fail("scenario has no reference block");
    case ReferenceSpec::Kind::manufactured:
      return std::make_unique<ManufacturedReference>(build_grid(cfg), cfg.reference.wave);
    case ReferenceSpec::Kind::high_resolution: {
      ScenarioConfig fine = cfg;
      fine.n = cfg.n * cfg.reference.factor;
      fine.reference.kind = ReferenceSpec::Kind::none;
      const State init = build_initial(fine);
      auto traj = std::make_shared<Trajectory>(
          simulate(init, fine.params, controls_with_checkpoints(fine)));
      if (traj->status != RunStatus::ok) {
        throw std::runtime_error("high-resolution reference run aborted: " + traj->abort_message);
      }
      return std::make_unique<TrajectoryReference>(std::move(traj), build_grid(cfg));
    }
  }
  throw std::logic_error("unreachable reference kind");
}

}  // namespace korteweg
