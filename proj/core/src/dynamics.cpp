#include "korteweg/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace korteweg {

namespace {

void require_above_floor(const Field& rho, double floor, const char* who) {
  double lo = rho.v.empty() ? 0.0 : rho.v[0];
  for (double x : rho.v) lo = std::min(lo, x);
  if (!(lo > floor)) {
    throw VacuumError(std::string(who) + ": density reached the vacuum floor (min " +
                      fmt_g17(lo) + ", floor " + fmt_g17(floor) + ")");
  }
}

// dx(mu dx f) + 1/2 dx(lambda dx f); the lambda branch can be dropped to
// probe that it vanishes identically at s = -1.
Field grad_div_coupling(const Field& f, const Field& mu_f, const Field& lambda_f,
                        bool include_lambda) {
  const Field df = deriv(f, 1);
  Field flux = mu_f * df;
  if (include_lambda) flux += 0.5 * (lambda_f * df);
  return deriv(flux, 1);
}

Field maybe_dealias(Field f, bool on) { return on ? dealias(f) : std::move(f); }

}  // namespace

Field apply_mu(const Field& rho, const ModelParams& p) {
  return map(rho, [&](double x) { return mu(x, p); });
}

Field apply_lambda(const Field& rho, const ModelParams& p) {
  return map(rho, [&](double x) { return lambda_bd(x, p); });
}

Field apply_pressure(const Field& rho, const ModelParams& p) {
  return map(rho, [&](double x) { return pressure(x, p); });
}

Field drift_velocity(const Field& rho, const ModelParams& p, double floor) {
  require_above_floor(rho, floor, "drift_velocity");
  const Field mu_field = apply_mu(rho, p);
  return deriv(mu_field, 1) / rho;
}

double drift_consistency_gap(const Field& rho, const Field& v, const ModelParams& p,
                             double floor) {
  const Field target = drift_velocity(rho, p, floor);
  return norm_linf(v - target) / (1.0 + norm_linf(target));
}

EulerRhs rhs_euler_korteweg(const EulerState& st, const ModelParams& p, const RhsOptions& opt) {
  require_above_floor(st.rho, opt.vacuum_floor, "rhs_euler_korteweg");
  const Field mu_f = apply_mu(st.rho, p);
  const Field lambda_f = apply_lambda(st.rho, p);
  const Field mass_flux = st.rho * st.u;

  EulerRhs rhs;
  rhs.d_rho = -deriv(mass_flux, 1);

  Field momentum = -deriv(mass_flux * st.u, 1) - deriv(apply_pressure(st.rho, p), 1);
  momentum += (p.epsilon * p.epsilon) *
              grad_div_coupling(st.v, mu_f, lambda_f, opt.include_lambda);
  rhs.d_momentum = std::move(momentum);

  rhs.d_drift_momentum =
      -deriv(mass_flux * st.v, 1) - grad_div_coupling(st.u, mu_f, lambda_f, opt.include_lambda);

  rhs.d_rho = maybe_dealias(std::move(rhs.d_rho), opt.dealias);
  rhs.d_momentum = maybe_dealias(std::move(rhs.d_momentum), opt.dealias);
  rhs.d_drift_momentum = maybe_dealias(std::move(rhs.d_drift_momentum), opt.dealias);
  return rhs;
}

NskRhs rhs_nsk(const NskState& st, const ModelParams& p, const RhsOptions& opt) {
  p.validate_nsk();
  require_above_floor(st.rho, opt.vacuum_floor, "rhs_nsk");
  const double coupling = std::sqrt(p.epsilon * p.epsilon - p.nu * p.nu);
  const Field mu_f = apply_mu(st.rho, p);
  const Field lambda_f = apply_lambda(st.rho, p);

  const Field u = st.w - p.nu * drift_velocity(st.rho, p, opt.vacuum_floor);
  const Field mass_flux = st.rho * u;

  const Field a_w = grad_div_coupling(st.w, mu_f, lambda_f, opt.include_lambda);
  const Field a_vbar = grad_div_coupling(st.vbar, mu_f, lambda_f, opt.include_lambda);

  NskRhs rhs;
  rhs.d_rho = -deriv(mass_flux, 1);
  rhs.d_momentum = -deriv(st.rho * st.w * u, 1) - deriv(apply_pressure(st.rho, p), 1) +
                   p.nu * a_w + coupling * a_vbar;
  rhs.d_drift_momentum = -deriv(st.rho * st.vbar * u, 1) + p.nu * a_vbar - coupling * a_w;

  rhs.d_rho = maybe_dealias(std::move(rhs.d_rho), opt.dealias);
  rhs.d_momentum = maybe_dealias(std::move(rhs.d_momentum), opt.dealias);
  rhs.d_drift_momentum = maybe_dealias(std::move(rhs.d_drift_momentum), opt.dealias);
  return rhs;
}

QuantumRhs rhs_quantum_euler_direct(const Field& rho, const Field& u, const ModelParams& p,
                                    const RhsOptions& opt) {
  if (p.s != -1.0) {
    throw std::invalid_argument("rhs_quantum_euler_direct: defined only for s = -1, got s=" +
                                std::to_string(p.s));
  }
  require_above_floor(rho, opt.vacuum_floor, "rhs_quantum_euler_direct");
  const Field sqrt_rho = map(rho, [](double x) { return std::sqrt(x); });
  const Field bohm = deriv(deriv(sqrt_rho, 2) / sqrt_rho, 1);

  QuantumRhs rhs;
  const Field mass_flux = rho * u;
  rhs.d_rho = -deriv(mass_flux, 1);
  rhs.d_momentum = -deriv(mass_flux * u, 1) - deriv(apply_pressure(rho, p), 1) +
                   (2.0 * p.epsilon * p.epsilon) * (rho * bohm);

  rhs.d_rho = maybe_dealias(std::move(rhs.d_rho), opt.dealias);
  rhs.d_momentum = maybe_dealias(std::move(rhs.d_momentum), opt.dealias);
  return rhs;
}

Field korteweg_divergence_direct(const Field& rho, const ModelParams& p) {
  require_above_floor(rho, 0.0, "korteweg_divergence_direct");
  const Field k_f = map(rho, [&](double x) { return capillarity(x, p); });
  const Field kp_f = map(rho, [&](double x) { return capillarity_prime(x, p); });
  const Field drho = deriv(rho, 1);
  const Field grad_sq = drho * drho;

  Field stress = rho * deriv(k_f * drho, 1);
  stress += 0.5 * ((k_f - rho * kp_f) * grad_sq);
  stress -= k_f * grad_sq;
  return deriv(stress, 1);
}

Field korteweg_divergence_nonconservative(const Field& rho, const ModelParams& p) {
  require_above_floor(rho, 0.0, "korteweg_divergence_nonconservative");
  const Field k_f = map(rho, [&](double x) { return capillarity(x, p); });
  const Field kp_f = map(rho, [&](double x) { return capillarity_prime(x, p); });
  const Field drho = deriv(rho, 1);
  return rho * deriv(k_f * deriv(rho, 2) + 0.5 * (kp_f * (drho * drho)), 1);
}

double bohm_identity_residual(const Field& rho, const ModelParams& p) {
  const Field v = drift_velocity(rho, p);
  const Field mu_f = apply_mu(rho, p);
  const Field lambda_f = apply_lambda(rho, p);
  const Field gradient_form = grad_div_coupling(v, mu_f, lambda_f, true);
  const Field stress_form = korteweg_divergence_direct(rho, p);
  const double scale =
      std::max({norm_linf(gradient_form), norm_linf(stress_form), 1e-300});
  return norm_linf(gradient_form - stress_form) / scale;
}

double nsk_dissipation_rate(const NskState& st, const ModelParams& p) {
  const Field drho = deriv(st.rho, 1);
  const Field dw = deriv(st.w, 1);
  const Field dvbar = deriv(st.vbar, 1);
  const Field weight = map(st.rho, [&](double x) { return mu_prime(x, p) * enthalpy_second(x, p); });
  const Field mu_f = apply_mu(st.rho, p);
  const Field lambda_f = apply_lambda(st.rho, p);
  const Field visc = mu_f + 0.5 * lambda_f;
  return p.nu * quad(weight * (drho * drho) + visc * (dw * dw + dvbar * dvbar));
}

}  // namespace korteweg
