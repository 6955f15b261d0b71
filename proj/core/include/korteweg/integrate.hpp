#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "korteweg/dynamics.hpp"

namespace korteweg {

enum class ModelKind { euler_korteweg, nsk, quantum_euler_direct };

std::string to_string(ModelKind m);
ModelKind model_from_string(const std::string& name);

// Primitive snapshot.  Meaning of (vel, drift) depends on the model:
//   euler_korteweg:       vel = u, drift = v
//   nsk:                  vel = w, drift = vbar
//   quantum_euler_direct: vel = u, drift kept zero
struct State {
  ModelKind model;
  Field rho;
  Field vel;
  Field drift;
};

State make_euler_state(const Field& rho, const Field& u, const Field& v);
State make_nsk_state(const Field& rho, const Field& w, const Field& vbar);
State make_quantum_state(const Field& rho, const Field& u);

// Transport velocity: u for the conservative models, w - nu v for nsk.
Field transport_velocity(const State& s, const ModelParams& p);

struct TimeControls {
  double t_end = 1.0;
  double cfl_hyperbolic = 0.4;
  double cfl_dispersive = 0.25;
  double dt_max = std::numeric_limits<double>::infinity();
  // Negative means: resolve to 1e-8 * mean(rho0) when the run starts.
  double vacuum_floor = -1.0;
  int record_stride = 1;
  double drift_tol = 1e-6;
  bool dealias = true;
  // Forced landing times; every checkpoint is recorded exactly.
  std::vector<double> checkpoints;

  void validate() const;
};

enum class RunStatus { ok, vacuum_abort, consistency_abort, nonfinite_abort };

std::string to_string(RunStatus s);

struct Trajectory {
  ModelKind model = ModelKind::euler_korteweg;
  ModelParams params;
  std::vector<double> times;
  std::vector<double> step_dt;  // dt of the step that produced each snapshot; 0 at t = 0
  std::vector<State> states;
  // Time-integrated dissipation functional, trapezoid over recorded snapshots
  // (identically zero for the conservative models).
  std::vector<double> cumulative_dissipation;
  RunStatus status = RunStatus::ok;
  std::string abort_message;
  double vacuum_floor_used = 0.0;
  long long total_steps = 0;

  int size() const { return static_cast<int>(times.size()); }
};

// Optional sources added to the momentum and drift-momentum equations,
// evaluated at the stage time.  Used to embed manufactured solutions.
using Forcing = std::function<void(double t, Field& d_momentum, Field& d_drift_momentum)>;

// Composite step bound:
//   s_max = max(|u| + sqrt(p'(rho)))
//   a_max = max( eps mu'(rho) sqrt(rho K(rho)) / rho, nu mu(rho) / rho )
//   dt    = min(cfl_h dx / s_max, cfl_d dx^2 / a_max, dt_max)
double stable_dt(const State& s, const ModelParams& p, const TimeControls& c);

// One classical fourth-order step; dt = 0 reproduces the state exactly.
State rk4_step(const State& s, double dt, const ModelParams& p, const TimeControls& c,
               double t = 0.0, const Forcing* forcing = nullptr);

// Adaptive march to t_end.  Records the initial state, every record_stride-th
// accepted step, every checkpoint, and the final state.  Aborts (with status
// and the last valid snapshot recorded) on vacuum, drift-consistency, or
// non-finite failures.
Trajectory simulate(const State& init, const ModelParams& p, const TimeControls& c,
                    const Forcing* forcing = nullptr);

// Uniform m+1 times 0, T/m, ..., T; the default comparison grid.
std::vector<double> uniform_checkpoints(double t_end, int m);

}  // namespace korteweg
