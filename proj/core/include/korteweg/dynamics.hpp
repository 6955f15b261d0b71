#pragma once

#include <stdexcept>

#include "korteweg/constitutive.hpp"
#include "korteweg/field.hpp"

namespace korteweg {

struct VacuumError : std::runtime_error {
  explicit VacuumError(const std::string& what) : std::runtime_error(what) {}
};

// Conservative carrier (rho, rho u, rho v).  v is evolved as its own unknown
// and is expected to shadow drift_velocity(rho); the integrator checks the
// gap each accepted step instead of re-projecting.
struct EulerState {
  Field rho;
  Field u;
  Field v;
};

// Dissipative variant in effective variables: w = u + nu v, vbar = sqrt(eps^2
// - nu^2) v.  The transport velocity is recovered, never stored.
struct NskState {
  Field rho;
  Field w;
  Field vbar;
};

// grad(mu(rho))/rho; throws VacuumError when min(rho) <= floor.
Field drift_velocity(const Field& rho, const ModelParams& p, double floor = 0.0);

// ||v - drift_velocity(rho)||_inf / (1 + ||drift_velocity(rho)||_inf).
double drift_consistency_gap(const Field& rho, const Field& v, const ModelParams& p,
                             double floor = 0.0);

struct RhsOptions {
  bool dealias = true;         // 2/3-filter the assembled right-hand sides
  bool include_lambda = true;  // disable to probe the lambda-free assembly
  double vacuum_floor = 0.0;
};

struct EulerRhs {
  Field d_rho;             // d/dt of rho
  Field d_momentum;        // d/dt of rho u
  Field d_drift_momentum;  // d/dt of rho v
};

struct NskRhs {
  Field d_rho;             // d/dt of rho
  Field d_momentum;        // d/dt of rho w
  Field d_drift_momentum;  // d/dt of rho vbar
};

struct QuantumRhs {
  Field d_rho;
  Field d_momentum;
};

// Conservative-variable right-hand side of the augmented capillary system:
//   d(rho)    = -dx(rho u)
//   d(rho u)  = -dx(rho u^2) - dx p + eps^2 [dx(mu dx v) + 1/2 dx(lambda dx v)]
//   d(rho v)  = -dx(rho v u) - dx(mu dx u) - 1/2 dx(lambda dx u)
EulerRhs rhs_euler_korteweg(const EulerState& st, const ModelParams& p,
                            const RhsOptions& opt = {});

// Effective-variable dissipative system; u = w - nu * drift_velocity(rho).
//   d(rho)      = -dx(rho u)
//   d(rho w)    = -dx(rho w u) - dx p + nu A(w) + sqrt(eps^2 - nu^2) A(vbar)
//   d(rho vbar) = -dx(rho vbar u) + nu A(vbar) - sqrt(eps^2 - nu^2) A(w)
// with A(f) = dx(mu dx f) + 1/2 dx(lambda dx f).
NskRhs rhs_nsk(const NskState& st, const ModelParams& p, const RhsOptions& opt = {});

// Direct quantum form, defined only for s = -1:
//   d(rho u) = -dx(rho u^2) - dx p + 2 eps^2 rho dx( dxx(sqrt rho) / sqrt rho ).
QuantumRhs rhs_quantum_euler_direct(const Field& rho, const Field& u, const ModelParams& p,
                                    const RhsOptions& opt = {});

// Divergence of the capillary stress assembled from the stress tensor:
//   T = rho dx(K dx rho) + 1/2 (K - rho K') (dx rho)^2 - K (dx rho)^2,
// returned as dx(T).
Field korteweg_divergence_direct(const Field& rho, const ModelParams& p);

// Independent route to the same quantity, rho dx(K dxx rho + 1/2 K' (dx rho)^2).
Field korteweg_divergence_nonconservative(const Field& rho, const ModelParams& p);

// L_inf gap between the gradient-weight form dx(mu dx v) + 1/2 dx(lambda dx v)
// (v = drift velocity) and the stress form, normalized by the larger norm.
double bohm_identity_residual(const Field& rho, const ModelParams& p);

// Instantaneous dissipation functional of the effective-variable system:
//   nu * quad( mu' H'' (dx rho)^2 + (mu + lambda/2)((dx w)^2 + (dx vbar)^2) ).
double nsk_dissipation_rate(const NskState& st, const ModelParams& p);

// Pointwise constitutive evaluation over a field (vacuum-guarded).
Field apply_mu(const Field& rho, const ModelParams& p);
Field apply_lambda(const Field& rho, const ModelParams& p);
Field apply_pressure(const Field& rho, const ModelParams& p);

}  // namespace korteweg
