#pragma once

#include <string>
#include <vector>

#include "korteweg/reference.hpp"

namespace korteweg {

struct EnergyReport {
  double kinetic = 0.0;
  double internal = 0.0;
  double capillary = 0.0;
  double total = 0.0;
  // Same capillary functional from the density gradient instead of the
  // evolved drift field; the two agree while the drift shadow holds.
  double capillary_cross = 0.0;
  double dissipation_rate = 0.0;
};

// 1/2 rho u^2 + H(rho) + (eps^2/2) rho v^2; conserved by the conservative model.
EnergyReport energy_euk(const EulerState& st, const ModelParams& p);

// 1/2 rho w^2 + H(rho) + 1/2 rho vbar^2; decays at the dissipation rate.
EnergyReport energy_nsk(const NskState& st, const ModelParams& p);

struct RelEntropyReport {
  double value = 0.0;
  double velocity_gap = 0.0;
  double drift_gap = 0.0;
  double enthalpy_gap = 0.0;
  double time_integrated_gap = 0.0;
  double b_value = 0.0;
  double gronwall_C = 0.0;
  bool bound_satisfied = false;
};

// 1/2 int rho |u-U|^2 + (eps^2/2) int rho |v-V|^2 + int H(rho|r).
RelEntropyReport relative_entropy_euk(const EulerState& st, const EulerState& ref,
                                      const ModelParams& p);

// Instantaneous part of the dissipative functional:
// 1/2 int rho (|w-W|^2 + |vbar-Vbar|^2) + int H(rho|r).
RelEntropyReport relative_entropy_nsk(const NskState& st, const NskState& ref,
                                      const ModelParams& p);

// Integrand of the time-integrated part:
// nu int mu(rho) (|dx(vbar-Vbar)|^2 + |dx(w-W)|^2)
// + (nu/2) int lambda(rho) ((dx(vbar-Vbar))^2 + (dx(w-W))^2).
double nsk_gradient_gap_rate(const NskState& st, const NskState& ref, const ModelParams& p);

// Gradient-form variant: the drift gap is replaced by the modulated
// capillarity integrand
//   I_T = K(rho)|dx rho|^2 - K(r)|dx r|^2 - K'(r)|dx r|^2 (rho - r)
//         - 2 K(r) dx r (dx rho - dx r),
// which is not sign-definite pointwise.
double relative_entropy_glt(const EulerState& st, const EulerState& ref, const ModelParams& p);

struct ResidualPair {
  Field momentum;  // residual of the reference momentum equation
  Field drift;     // residual of the reference drift equation
};

// Residuals of (r, U, V) in the strong conservative system.  Vanish when the
// reference solves it; the drift residual vanishes whenever r and U satisfy
// the continuity equation.
ResidualPair strong_residual_euk(const ReferenceSolution& ref, double t, const ModelParams& p);

// Residuals of (r, W, Vbar) in the strong dissipative system.
ResidualPair strong_residual_nsk(const ReferenceSolution& ref, double t, const ModelParams& p);

enum class Functional { euk, nsk, glt };
std::string to_string(Functional f);
Functional functional_from_string(const std::string& name);

// Primitive (rho, u, v) view of a snapshot: recovers u = w - nu drift and
// v = vbar / sqrt(eps^2 - nu^2) for the dissipative model, and the drift
// velocity for the direct quantum model.
EulerState euler_view(const State& snapshot, const ModelParams& p);

struct EntropySeries {
  Functional functional = Functional::euk;
  std::vector<double> times;
  std::vector<double> value;  // includes the time-integrated part
  std::vector<double> velocity_gap;
  std::vector<double> drift_gap;
  std::vector<double> enthalpy_gap;
  std::vector<double> time_integrated_gap;
  std::vector<double> b;  // cumulative source term
};

// Evaluates the chosen functional and its source term along a trajectory
// against a reference, at recorded times (trapezoid accumulation in time).
// The source term integrand is |(rho/r)(E1 (U-u) + eps^2 E2 (V-v))| for the
// conservative functionals and the signed dissipative pairing for nsk.
EntropySeries relative_entropy_series(const Trajectory& traj, const ReferenceSolution& ref,
                                      Functional f, const std::vector<double>& eval_times);

struct Certificate {
  double C = 0.0;
  bool satisfied = false;
  double margin = 0.0;  // min over checkpoints of (bound - value) / scale
  std::vector<double> bound;
};

// Checks value(t_k) <= E(0) e^{C t_k} + b_k + C int_0^{t_k} b e^{C(t_k - s)} ds
// with trapezoid convolution and relative slack 1e-9.
Certificate gronwall_certify(const std::vector<double>& times, const std::vector<double>& value,
                             const std::vector<double>& b, double C);

// Smallest satisfying C in [c_lo, c_hi] by bisection (the bound grows with C);
// +infinity when even c_hi fails.
double gronwall_threshold(const std::vector<double>& times, const std::vector<double>& value,
                          const std::vector<double>& b, double c_lo, double c_hi);

// c0 * (1 + sup_t(||dx U|| + ||dx V|| + ||dxx V|| + ||div U||) + lemma_constants),
// sup over the given times, norms in L_inf.
double estimate_gronwall_constant(const ReferenceSolution& ref, const std::vector<double>& times,
                                  const ModelParams& p, double c0, double lemma_constants);

// C (1 + nu / (eps^2 - nu^2)); the certificate constant of the dissipative
// comparison degrades as nu approaches eps.
double nsk_certificate_constant(double C, const ModelParams& p);

}  // namespace korteweg
