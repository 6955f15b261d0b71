#include "korteweg/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace korteweg {

namespace {

struct Cons {
  Field rho;
  Field m2;  // rho * vel
  Field m3;  // rho * drift
};

Cons pack(const State& s) {
  return Cons{s.rho, s.rho * s.vel, s.rho * s.drift};
}

State unpack(ModelKind model, const Cons& c) {
  State s;
  s.model = model;
  s.rho = c.rho;
  s.vel = c.m2 / c.rho;
  s.drift = c.m3 / c.rho;
  return s;
}

Cons axpy(const Cons& base, double h, const Cons& dir) {
  return Cons{base.rho + h * dir.rho, base.m2 + h * dir.m2, base.m3 + h * dir.m3};
}

double min_value(const Field& f) {
  double lo = f.v.empty() ? 0.0 : f.v[0];
  for (double x : f.v) lo = std::min(lo, x);
  return lo;
}

Cons eval_rhs(ModelKind model, const Cons& c, const ModelParams& p, const RhsOptions& opt,
              double t, const Forcing* forcing) {
  if (!(min_value(c.rho) > opt.vacuum_floor)) {
    throw VacuumError("simulate: density reached the vacuum floor at t = " + fmt_g17(t));
  }
  Cons d;
  switch (model) {
    case ModelKind::euler_korteweg: {
      EulerState st{c.rho, c.m2 / c.rho, c.m3 / c.rho};
      EulerRhs r = rhs_euler_korteweg(st, p, opt);
      d = Cons{std::move(r.d_rho), std::move(r.d_momentum), std::move(r.d_drift_momentum)};
      break;
    }
    case ModelKind::nsk: {
      NskState st{c.rho, c.m2 / c.rho, c.m3 / c.rho};
      NskRhs r = rhs_nsk(st, p, opt);
      d = Cons{std::move(r.d_rho), std::move(r.d_momentum), std::move(r.d_drift_momentum)};
      break;
    }
    case ModelKind::quantum_euler_direct: {
      QuantumRhs r = rhs_quantum_euler_direct(c.rho, c.m2 / c.rho, p, opt);
      d = Cons{std::move(r.d_rho), std::move(r.d_momentum), Field::zeros(c.rho.grid)};
      break;
    }
  }
  if (forcing) (*forcing)(t, d.m2, d.m3);
  return d;
}

Cons rk4_cons(ModelKind model, const Cons& c0, double dt, const ModelParams& p,
              const RhsOptions& opt, double t, const Forcing* forcing) {
  const Cons k1 = eval_rhs(model, c0, p, opt, t, forcing);
  const Cons k2 = eval_rhs(model, axpy(c0, 0.5 * dt, k1), p, opt, t + 0.5 * dt, forcing);
  const Cons k3 = eval_rhs(model, axpy(c0, 0.5 * dt, k2), p, opt, t + 0.5 * dt, forcing);
  const Cons k4 = eval_rhs(model, axpy(c0, dt, k3), p, opt, t + dt, forcing);
  Cons out = c0;
  const double w = dt / 6.0;
  for (int j = 0; j < c0.rho.size(); ++j) {
    out.rho.v[j] += w * (k1.rho.v[j] + 2.0 * k2.rho.v[j] + 2.0 * k3.rho.v[j] + k4.rho.v[j]);
    out.m2.v[j] += w * (k1.m2.v[j] + 2.0 * k2.m2.v[j] + 2.0 * k3.m2.v[j] + k4.m2.v[j]);
    out.m3.v[j] += w * (k1.m3.v[j] + 2.0 * k2.m3.v[j] + 2.0 * k3.m3.v[j] + k4.m3.v[j]);
  }
  return out;
}

bool cons_finite(const Cons& c) {
  return all_finite(c.rho) && all_finite(c.m2) && all_finite(c.m3);
}

// Drift-shadow gap of the accepted state; empty optional means "no check".
double shadow_gap(ModelKind model, const Cons& c, const ModelParams& p, double floor) {
  if (model == ModelKind::quantum_euler_direct) return 0.0;
  const Field dv = drift_velocity(c.rho, p, floor);
  Field target = dv;
  if (model == ModelKind::nsk) {
    target = std::sqrt(p.epsilon * p.epsilon - p.nu * p.nu) * dv;
  }
  return norm_linf(c.m3 / c.rho - target) / (1.0 + norm_linf(target));
}

}  // namespace

std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::euler_korteweg: return "euler_korteweg";
    case ModelKind::nsk: return "nsk";
    case ModelKind::quantum_euler_direct: return "quantum_euler_direct";
  }
  return "unknown";
}

ModelKind model_from_string(const std::string& name) {
  if (name == "euler_korteweg") return ModelKind::euler_korteweg;
  if (name == "nsk") return ModelKind::nsk;
  if (name == "quantum_euler_direct") return ModelKind::quantum_euler_direct;
  throw std::invalid_argument("unknown model: " + name);
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::vacuum_abort: return "vacuum_abort";
    case RunStatus::consistency_abort: return "consistency_abort";
    case RunStatus::nonfinite_abort: return "nonfinite_abort";
  }
  return "unknown";
}

State make_euler_state(const Field& rho, const Field& u, const Field& v) {
  return State{ModelKind::euler_korteweg, rho, u, v};
}

State make_nsk_state(const Field& rho, const Field& w, const Field& vbar) {
  return State{ModelKind::nsk, rho, w, vbar};
}

State make_quantum_state(const Field& rho, const Field& u) {
  return State{ModelKind::quantum_euler_direct, rho, u, Field::zeros(rho.grid)};
}

Field transport_velocity(const State& s, const ModelParams& p) {
  if (s.model == ModelKind::nsk) return s.vel - p.nu * drift_velocity(s.rho, p);
  return s.vel;
}

void TimeControls::validate() const {
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw std::invalid_argument("controls: t_end must be finite and >= 0");
  }
  if (!(cfl_hyperbolic > 0.0) || !(cfl_dispersive > 0.0)) {
    throw std::invalid_argument("controls: cfl factors must be positive");
  }
  if (!(dt_max > 0.0)) throw std::invalid_argument("controls: dt_max must be positive");
  if (record_stride < 1) throw std::invalid_argument("controls: record_stride must be >= 1");
  if (!(drift_tol > 0.0)) throw std::invalid_argument("controls: drift tolerance must be positive");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (!(checkpoints[i] >= 0.0) || !std::isfinite(checkpoints[i])) {
      throw std::invalid_argument("controls: checkpoints must be finite and >= 0");
    }
    if (i > 0 && !(checkpoints[i] > checkpoints[i - 1])) {
      throw std::invalid_argument("controls: checkpoints must be strictly increasing");
    }
  }
}

double stable_dt(const State& s, const ModelParams& p, const TimeControls& c) {
  const Field u = transport_velocity(s, p);
  double s_max = 0.0;
  double a_max = 0.0;
  const double nu_visc = s.model == ModelKind::nsk ? p.nu : 0.0;
  for (int j = 0; j < s.rho.size(); ++j) {
    const double rho = s.rho.v[j];
    s_max = std::max(s_max, std::abs(u.v[j]) + std::sqrt(pressure_prime(rho, p)));
    const double disp =
        p.epsilon * mu_prime(rho, p) * std::sqrt(rho * capillarity(rho, p)) / rho;
    const double visc = nu_visc * mu(rho, p) / rho;
    a_max = std::max(a_max, std::max(disp, visc));
  }
  const double dx = s.rho.grid->dx();
  double dt = c.dt_max;
  if (s_max > 0.0) dt = std::min(dt, c.cfl_hyperbolic * dx / s_max);
  if (a_max > 0.0) dt = std::min(dt, c.cfl_dispersive * dx * dx / a_max);
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::runtime_error("stable_dt: no finite positive step bound");
  }
  return dt;
}

State rk4_step(const State& s, double dt, const ModelParams& p, const TimeControls& c,
               double t, const Forcing* forcing) {
  if (dt == 0.0) return s;
  RhsOptions opt;
  opt.dealias = c.dealias;
  opt.vacuum_floor = std::max(c.vacuum_floor, 0.0);
  const Cons out = rk4_cons(s.model, pack(s), dt, p, opt, t, forcing);
  return unpack(s.model, out);
}

std::vector<double> uniform_checkpoints(double t_end, int m) {
  if (m < 1) throw std::invalid_argument("uniform_checkpoints: need at least one interval");
  if (!(t_end >= 0.0)) throw std::invalid_argument("uniform_checkpoints: t_end must be nonnegative");
  std::vector<double> ts;
  ts.reserve(m + 1);
  for (int j = 0; j <= m; ++j) ts.push_back(t_end * j / m);
  return ts;
}

Trajectory simulate(const State& init, const ModelParams& p, const TimeControls& c,
                    const Forcing* forcing) {
  c.validate();
  if (init.model == ModelKind::nsk) {
    p.validate_nsk();
  } else {
    p.validate();
  }
  if (!all_finite(init.rho) || !all_finite(init.vel) || !all_finite(init.drift)) {
    throw std::invalid_argument("simulate: initial state contains non-finite values");
  }

  RhsOptions opt;
  opt.dealias = c.dealias;

  Trajectory traj;
  traj.model = init.model;
  traj.params = p;

  Cons cur;
  {
    State start = init;
    if (c.dealias) {
      start.rho = dealias(start.rho);
      start.vel = dealias(start.vel);
      start.drift = dealias(start.drift);
    }
    cur = pack(start);
  }

  const double mean_rho = quad(cur.rho) / cur.rho.grid->length();
  const double floor = c.vacuum_floor >= 0.0 ? c.vacuum_floor : 1e-8 * mean_rho;
  opt.vacuum_floor = floor;
  traj.vacuum_floor_used = floor;
  if (!(min_value(cur.rho) > floor)) {
    throw VacuumError("simulate: initial density at or below the vacuum floor");
  }

  // Landing times: strictly increasing interior checkpoints plus t_end.
  std::vector<double> landings;
  for (double tc : c.checkpoints) {
    if (tc > 0.0 && tc < c.t_end) landings.push_back(tc);
  }
  landings.push_back(c.t_end);

  double last_recorded_t = 0.0;
  double last_rate = 0.0;
  const bool dissipative = init.model == ModelKind::nsk;

  auto record = [&](double t, double dt_used) {
    State snap = unpack(init.model, cur);
    double d_cum = traj.cumulative_dissipation.empty() ? 0.0 : traj.cumulative_dissipation.back();
    if (dissipative) {
      const double rate = nsk_dissipation_rate(NskState{snap.rho, snap.vel, snap.drift}, p);
      if (!traj.times.empty()) {
        d_cum += 0.5 * (t - last_recorded_t) * (last_rate + rate);
      }
      last_rate = rate;
    }
    traj.times.push_back(t);
    traj.step_dt.push_back(dt_used);
    traj.states.push_back(std::move(snap));
    traj.cumulative_dissipation.push_back(d_cum);
    last_recorded_t = t;
  };

  record(0.0, 0.0);
  if (c.t_end == 0.0) return traj;

  double t = 0.0;
  std::size_t landing_idx = 0;
  long long accepted = 0;
  const double t_eps = 1e-14 * std::max(1.0, c.t_end);

  while (t < c.t_end - t_eps) {
    while (landing_idx < landings.size() && landings[landing_idx] <= t + t_eps) ++landing_idx;
    const double t_target = landing_idx < landings.size() ? landings[landing_idx] : c.t_end;

    double dt;
    try {
      dt = stable_dt(unpack(init.model, cur), p, c);
    } catch (const std::exception& e) {
      traj.status = RunStatus::nonfinite_abort;
      traj.abort_message = e.what();
      break;
    }
    bool landing = false;
    if (dt >= t_target - t - t_eps) {
      dt = t_target - t;
      landing = true;
    }
    if (!(dt > 0.0)) {
      traj.status = RunStatus::nonfinite_abort;
      traj.abort_message = "simulate: step size collapsed at t = " + fmt_g17(t);
      break;
    }

    Cons next;
    try {
      next = rk4_cons(init.model, cur, dt, p, opt, t, forcing);
    } catch (const VacuumError& e) {
      traj.status = RunStatus::vacuum_abort;
      traj.abort_message = e.what();
      break;
    }

    const double t_new = landing ? t_target : t + dt;
    if (!cons_finite(next)) {
      traj.status = RunStatus::nonfinite_abort;
      traj.abort_message = "simulate: non-finite values at t = " + fmt_g17(t_new);
      break;
    }
    if (!(min_value(next.rho) > floor)) {
      traj.status = RunStatus::vacuum_abort;
      traj.abort_message = "simulate: density reached the vacuum floor at t = " + fmt_g17(t_new);
      break;
    }
    double gap = 0.0;
    try {
      gap = shadow_gap(init.model, next, p, floor);
    } catch (const VacuumError& e) {
      traj.status = RunStatus::vacuum_abort;
      traj.abort_message = e.what();
      break;
    }
    if (gap > c.drift_tol) {
      traj.status = RunStatus::consistency_abort;
      traj.abort_message = "simulate: drift-shadow gap " + fmt_g17(gap) + " exceeds tolerance " +
                           fmt_g17(c.drift_tol) + " at t = " + fmt_g17(t_new);
      break;
    }

    cur = std::move(next);
    t = t_new;
    ++accepted;
    if (landing) ++landing_idx;
    const bool at_end = t >= c.t_end - t_eps;
    if (landing || at_end || (accepted % c.record_stride == 0)) record(t, dt);
  }

  traj.total_steps = accepted;
  // On abort the march stopped before t advanced; make sure the last valid
  // state is present for post-mortems.
  if (traj.status != RunStatus::ok && (traj.times.empty() || traj.times.back() < t - t_eps)) {
    record(t, traj.step_dt.empty() ? 0.0 : traj.step_dt.back());
  }
  return traj;
}

}  // namespace korteweg
