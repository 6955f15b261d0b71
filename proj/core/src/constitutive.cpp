#include "korteweg/constitutive.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace korteweg {

namespace {

void require_admissible(const ModelParams& p) {
  if (!(p.gamma > 1.0)) {
    throw std::invalid_argument("gamma must exceed 1, got " + std::to_string(p.gamma));
  }
  if (!(p.s >= -1.0)) {
    throw std::invalid_argument("s must be >= -1, got " + std::to_string(p.s));
  }
  if (!(p.gamma >= p.s + 2.0)) {
    throw std::invalid_argument("need gamma >= s + 2, got gamma=" + std::to_string(p.gamma) +
                                " s=" + std::to_string(p.s));
  }
  if (!(p.epsilon >= 0.0) || !std::isfinite(p.epsilon)) {
    throw std::invalid_argument("epsilon must be finite and >= 0");
  }
  if (!(p.nu >= 0.0) || !std::isfinite(p.nu)) {
    throw std::invalid_argument("nu must be finite and >= 0");
  }
}

double positive(double rho, const char* who) {
  if (!(rho > 0.0)) {
    throw std::domain_error(std::string(who) + ": density must be positive, got " +
                            std::to_string(rho));
  }
  return rho;
}

double positive_tau(double tau) {
  if (!(tau > 0.0)) {
    throw std::domain_error("phi: argument must be positive, got " + std::to_string(tau));
  }
  return tau;
}

}  // namespace

void ModelParams::validate() const { require_admissible(*this); }

void ModelParams::validate_nsk() const {
  require_admissible(*this);
  if (!(nu < epsilon)) {
    throw std::invalid_argument("dissipative variant needs nu < epsilon, got nu=" +
                                std::to_string(nu) + " epsilon=" + std::to_string(epsilon));
  }
}

double pressure(double rho, const ModelParams& p) {
  return std::pow(positive(rho, "pressure"), p.gamma);
}

double pressure_prime(double rho, const ModelParams& p) {
  return p.gamma * std::pow(positive(rho, "pressure_prime"), p.gamma - 1.0);
}

double enthalpy(double rho, const ModelParams& p) {
  return std::pow(positive(rho, "enthalpy"), p.gamma) / (p.gamma - 1.0);
}

double enthalpy_prime(double rho, const ModelParams& p) {
  return p.gamma / (p.gamma - 1.0) * std::pow(positive(rho, "enthalpy_prime"), p.gamma - 1.0);
}

double enthalpy_second(double rho, const ModelParams& p) {
  return p.gamma * std::pow(positive(rho, "enthalpy_second"), p.gamma - 2.0);
}

double modulated_enthalpy(ThermoSample sample, const ModelParams& p) {
  positive(sample.rho, "modulated_enthalpy");
  positive(sample.r, "modulated_enthalpy");
  return enthalpy(sample.rho, p) - enthalpy(sample.r, p) -
         enthalpy_prime(sample.r, p) * (sample.rho - sample.r);
}

double mu(double rho, const ModelParams& p) {
  return std::pow(positive(rho, "mu"), p.ell());
}

double mu_prime(double rho, const ModelParams& p) {
  const double ell = p.ell();
  return ell * std::pow(positive(rho, "mu_prime"), ell - 1.0);
}

double mu_second(double rho, const ModelParams& p) {
  const double ell = p.ell();
  return ell * (ell - 1.0) * std::pow(positive(rho, "mu_second"), ell - 2.0);
}

double lambda_bd(double rho, const ModelParams& p) {
  // 2 (rho mu' - mu) collapses to (s+1) rho^ell; exact zero at s = -1.
  return (p.s + 1.0) * std::pow(positive(rho, "lambda_bd"), p.ell());
}

double capillarity(double rho, const ModelParams& p) {
  const double c = 0.25 * (p.s + 3.0) * (p.s + 3.0);
  return c * std::pow(positive(rho, "capillarity"), p.s);
}

double capillarity_prime(double rho, const ModelParams& p) {
  const double c = 0.25 * (p.s + 3.0) * (p.s + 3.0);
  return c * p.s * std::pow(positive(rho, "capillarity_prime"), p.s - 1.0);
}

double phi(double tau, const ModelParams& p) {
  return std::pow(positive_tau(tau), p.phi_exponent());
}

double phi_prime(double tau, const ModelParams& p) {
  const double a = p.phi_exponent();
  return a * std::pow(positive_tau(tau), a - 1.0);
}

double phi_second(double tau, const ModelParams& p) {
  const double a = p.phi_exponent();
  return a * (a - 1.0) * std::pow(positive_tau(tau), a - 2.0);
}

double phi1(ThermoSample sample, const ModelParams& p) {
  positive(sample.rho, "phi1");
  positive(sample.r, "phi1");
  const double mr = mu(sample.rho, p);
  const double mref = mu(sample.r, p);
  return phi(mr, p) - phi(mref, p) - phi_prime(mref, p) * (mr - mref);
}

double phi2(ThermoSample sample, const ModelParams& p) {
  positive(sample.rho, "phi2");
  positive(sample.r, "phi2");
  const double mr = mu(sample.rho, p);
  const double mref = mu(sample.r, p);
  return phi_second(mref, p) * (mr - mref) * sample.r -
         sample.rho * (phi_prime(mr, p) - phi_prime(mref, p));
}

}  // namespace korteweg
