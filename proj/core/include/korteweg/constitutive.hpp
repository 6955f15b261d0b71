#pragma once

namespace korteweg {

// Power-law closure family for capillary fluids.  A pair (gamma, s) fixes
// every coefficient: pressure p = rho^gamma, capillarity K = ((s+3)^2/4) rho^s,
// gradient weight mu = rho^((s+3)/2) and its companion lambda = (s+1) mu.
// epsilon scales the capillary energy, nu the viscosity of the dissipative
// variant.  Admissibility: gamma > 1, s >= -1, gamma >= s + 2; the dissipative
// variant additionally needs 0 <= nu < epsilon.
struct ModelParams {
  double gamma = 2.0;
  double s = -1.0;
  double epsilon = 0.0;
  double nu = 0.0;

  // mu(rho) = rho^ell; mu'(rho)^2 = rho K(rho) holds for every admissible s.
  double ell() const { return 0.5 * (s + 3.0); }
  // phi(tau) = tau^a with a = 2 gamma / (s+3); a > 1 whenever gamma >= s + 2.
  double phi_exponent() const { return 2.0 * gamma / (s + 3.0); }

  bool is_quantum() const { return s == -1.0; }

  void validate() const;      // throws std::invalid_argument when inadmissible
  void validate_nsk() const;  // validate() plus 0 <= nu < epsilon
};

// A (state, reference) density pair for modulated quantities.
struct ThermoSample {
  double rho;
  double r;
};

double pressure(double rho, const ModelParams& p);
double pressure_prime(double rho, const ModelParams& p);

// Internal energy density, normalized so enthalpy_second(rho) = p'(rho)/rho.
double enthalpy(double rho, const ModelParams& p);
double enthalpy_prime(double rho, const ModelParams& p);
double enthalpy_second(double rho, const ModelParams& p);

// Bregman gap H(rho) - H(r) - H'(r)(rho - r); nonnegative by convexity.
double modulated_enthalpy(ThermoSample sample, const ModelParams& p);

double mu(double rho, const ModelParams& p);
double mu_prime(double rho, const ModelParams& p);
double mu_second(double rho, const ModelParams& p);

// lambda = 2 (rho mu' - mu); vanishes identically at s = -1.
double lambda_bd(double rho, const ModelParams& p);

double capillarity(double rho, const ModelParams& p);
double capillarity_prime(double rho, const ModelParams& p);

// phi maps tau = mu(rho); phi(mu(rho)) = p(rho) and phi'(mu(rho)) = p'/mu'.
double phi(double tau, const ModelParams& p);
double phi_prime(double tau, const ModelParams& p);
double phi_second(double tau, const ModelParams& p);

// Bregman gap of phi composed with mu:
//   phi1(rho|r) = phi(mu(rho)) - phi(mu(r)) - phi'(mu(r)) (mu(rho) - mu(r)).
double phi1(ThermoSample sample, const ModelParams& p);

// Pressure-gap companion:
//   phi2(rho|r) = phi''(mu(r)) (mu(rho) - mu(r)) r
//                 - rho (phi'(mu(rho)) - phi'(mu(r))).
double phi2(ThermoSample sample, const ModelParams& p);

}  // namespace korteweg
