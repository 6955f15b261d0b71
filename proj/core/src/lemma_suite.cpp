#include "korteweg/lemma_suite.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace korteweg {

void SampleRegion::validate() const {
  if (!(rho_min > 0.0) || !(rho_max > rho_min)) {
    throw std::invalid_argument("sample region: need 0 < rho_min < rho_max");
  }
  if (!(r_min > 0.0) || !(r_max > r_min)) {
    throw std::invalid_argument("sample region: need 0 < r_min < r_max");
  }
  if (n_samples < 2) {
    throw std::invalid_argument("sample region: need n_samples >= 2");
  }
}

LowDiscrepancy::LowDiscrepancy(int dim, unsigned seed) : dim_(dim), index_(0) {
  if (dim < 1 || dim > 16) {
    throw std::invalid_argument("low-discrepancy dimension must be in [1, 16]");
  }
  // psi is the unique real root > 1 of x^(d+1) = x + 1; alpha_j = psi^-(j+1).
  double psi = 1.5;
  for (int it = 0; it < 128; ++it) {
    const double f = std::pow(psi, dim + 1) - psi - 1.0;
    const double df = (dim + 1) * std::pow(psi, dim) - 1.0;
    psi -= f / df;
  }
  alpha_.resize(static_cast<size_t>(dim));
  double a = 1.0;
  for (int j = 0; j < dim; ++j) {
    a /= psi;
    alpha_[static_cast<size_t>(j)] = a;
  }
  // Seed shifts the start of the stream; the stream itself stays nested.
  state_.resize(static_cast<size_t>(dim));
  for (int j = 0; j < dim; ++j) {
    const double s = 0.5 + (static_cast<double>(seed) + 1.0) * alpha_[static_cast<size_t>(j)];
    state_[static_cast<size_t>(j)] = s - std::floor(s);
  }
}

std::vector<double> LowDiscrepancy::next() {
  std::vector<double> out = state_;
  for (int j = 0; j < dim_; ++j) {
    double s = state_[static_cast<size_t>(j)] + alpha_[static_cast<size_t>(j)];
    if (s >= 1.0) s -= 1.0;
    state_[static_cast<size_t>(j)] = s;
  }
  ++index_;
  return out;
}

bool far_field(double rho, double r) { return rho <= 0.5 * r || rho >= 2.0 * r; }

namespace {

double lerp(double lo, double hi, double t) { return lo + (hi - lo) * t; }

// The exact-identity checks assemble intermediate terms that are orders of
// magnitude larger than the two sides and cancel (worst near v = V), so a
// double evaluation reports assembly roundoff (~1e-12 relative) instead of
// the identity's own gap. Both sides are therefore evaluated in long double;
// the closures below mirror the constitutive definitions term for term.
struct ExtendedClosures {
  long double ell, a, s, cap;
  explicit ExtendedClosures(const ModelParams& p)
      : ell(p.ell()),
        a(p.phi_exponent()),
        s(p.s),
        cap(0.25L * (static_cast<long double>(p.s) + 3.0L) *
            (static_cast<long double>(p.s) + 3.0L)) {}
  long double mu(long double rho) const { return std::pow(rho, ell); }
  long double mu_prime(long double rho) const { return ell * std::pow(rho, ell - 1.0L); }
  long double phi_prime(long double tau) const { return a * std::pow(tau, a - 1.0L); }
  long double phi_second(long double tau) const {
    return a * (a - 1.0L) * std::pow(tau, a - 2.0L);
  }
  long double phi2(long double rho, long double r) const {
    const long double mr = mu(rho), mref = mu(r);
    return phi_second(mref) * (mr - mref) * r - rho * (phi_prime(mr) - phi_prime(mref));
  }
  long double capillarity(long double rho) const { return cap * std::pow(rho, s); }
  long double capillarity_prime(long double rho) const {
    return cap * s * std::pow(rho, s - 1.0L);
  }
};

// Residual scale that tolerates both O(1) and large samples without letting a
// cancellation near zero masquerade as error.
double scaled_gap_l(long double lhs, long double rhs) {
  const long double scale = std::max({1.0L, std::fabs(lhs), std::fabs(rhs)});
  return static_cast<double>(std::fabs(lhs - rhs) / scale);
}

}  // namespace

double identity_modulated_pressure(const SampleRegion& region, const ModelParams& p) {
  region.validate();
  p.validate();
  LowDiscrepancy seq(4, region.seed);
  double worst = 0.0;
  for (int i = 0; i < region.n_samples; ++i) {
    const auto u = seq.next();
    const ExtendedClosures ec(p);
    const long double rho = lerp(region.rho_min, region.rho_max, u[0]);
    const long double r = lerp(region.r_min, region.r_max, u[1]);
    const long double drho = lerp(-2.0, 2.0, u[2]);
    const long double dr = lerp(-2.0, 2.0, u[3]);

    const long double v = ec.mu_prime(rho) * drho / rho;
    const long double V = ec.mu_prime(r) * dr / r;
    const long double fp_rho = ec.phi_prime(ec.mu(rho));
    const long double fp_r = ec.phi_prime(ec.mu(r));

    const long double lhs = rho * (fp_rho * v - fp_r * V) * (v - V);

    const long double grad_phi1 =
        (fp_rho - fp_r) * ec.mu_prime(rho) * drho -
        ec.phi_second(ec.mu(r)) * (ec.mu(rho) - ec.mu(r)) * ec.mu_prime(r) * dr;
    const long double f2 = ec.phi2(rho, r);
    const long double rhs = (grad_phi1 + f2 * V) * V + rho * fp_rho * (V - v) * (V - v);

    worst = std::max(worst, scaled_gap_l(lhs, rhs));
  }
  return worst;
}

double identity_modulated_pressure_fields(const Field& rho, const Field& r, const ModelParams& p) {
  require_same_grid(rho, r, "identity_modulated_pressure_fields");
  p.validate();

  const Field mu_rho = map(rho, [&](double x) { return mu(x, p); });
  const Field mu_r = map(r, [&](double x) { return mu(x, p); });
  const Field v = deriv(mu_rho, 1) / rho;
  const Field V = deriv(mu_r, 1) / r;
  const Field fp_rho = map(mu_rho, [&](double x) { return phi_prime(x, p); });
  const Field fp_r = map(mu_r, [&](double x) { return phi_prime(x, p); });

  const Field lhs = rho * (fp_rho * v - fp_r * V) * (v - V);

  const Field phi1_f = zip(rho, r, [&](double a, double b) { return phi1(ThermoSample{a, b}, p); });
  const Field phi2_f = zip(rho, r, [&](double a, double b) { return phi2(ThermoSample{a, b}, p); });
  const Field grad_phi1 = deriv(phi1_f, 1);
  const Field gap = V - v;
  const Field rhs = (grad_phi1 + phi2_f * V) * V + rho * fp_rho * gap * gap;

  const double scale = std::max({1.0, norm_linf(lhs), norm_linf(rhs)});
  return norm_linf(lhs - rhs) / scale;
}

double identity_glt_equivalence(const SampleRegion& region, const ModelParams& p) {
  region.validate();
  p.validate();
  LowDiscrepancy seq(4, region.seed);
  double worst = 0.0;
  for (int i = 0; i < region.n_samples; ++i) {
    const auto u = seq.next();
    const ExtendedClosures ec(p);
    const long double rho = lerp(region.rho_min, region.rho_max, u[0]);
    const long double r = lerp(region.r_min, region.r_max, u[1]);
    const long double drho = lerp(-2.0, 2.0, u[2]);
    const long double dr = lerp(-2.0, 2.0, u[3]);

    const long double k_rho = ec.capillarity(rho);
    const long double k_r = ec.capillarity(r);
    const long double kp_r = ec.capillarity_prime(r);

    const long double i_euk =
        std::sqrt(k_rho) * drho - std::sqrt(rho / r) * std::sqrt(k_r) * dr;
    const long double i3 = std::sqrt(k_r / k_rho) - std::sqrt(rho / r);
    const long double bregman_inv_k =
        1.0L / k_rho - 1.0L / k_r + kp_r / (k_r * k_r) * (rho - r);

    const long double lhs =
        i_euk * i_euk + k_r * dr * dr * i3 * i3 - k_r * k_r * dr * dr * bregman_inv_k;

    const long double i_t = k_rho * drho * drho - k_r * dr * dr - kp_r * dr * dr * (rho - r) -
                            2.0L * k_r * dr * (drho - dr);
    const long double rhs = i_t + 2.0L * std::sqrt(k_r) * dr * i_euk * i3;

    worst = std::max(worst, scaled_gap_l(lhs, rhs));
  }
  return worst;
}

std::string to_string(LemmaId id) {
  switch (id) {
    case LemmaId::tech1: return "tech1";
    case LemmaId::tech2_phi1: return "tech2_phi1";
    case LemmaId::tech2_phi2: return "tech2_phi2";
    case LemmaId::tech3_phi1: return "tech3_phi1";
    case LemmaId::tech3_phi2: return "tech3_phi2";
    case LemmaId::tech4: return "tech4";
  }
  throw std::logic_error("unreachable lemma id");
}

LemmaId lemma_from_string(const std::string& name) {
  if (name == "tech1") return LemmaId::tech1;
  if (name == "tech2_phi1") return LemmaId::tech2_phi1;
  if (name == "tech2_phi2") return LemmaId::tech2_phi2;
  if (name == "tech3_phi1") return LemmaId::tech3_phi1;
  if (name == "tech3_phi2") return LemmaId::tech3_phi2;
  if (name == "tech4") return LemmaId::tech4;
  throw std::invalid_argument("unknown lemma id: " + name);
}

namespace {

struct BranchSups {
  double near = 0.0;
  double far = 0.0;
  long long n_near = 0;
  long long n_far = 0;
};

void scan_sample(LemmaId id, const ModelParams& p, double rho, double r, BranchSups& out) {
  const bool far = far_field(rho, r);
  const double h = modulated_enthalpy(ThermoSample{rho, r}, p);
  const double diff2 = (rho - r) * (rho - r);
  const double growth = std::pow(1.0 + rho, p.gamma);

  double num = 0.0;
  double den = 1.0;
  switch (id) {
    case LemmaId::tech1:
      num = far ? growth : diff2;
      den = h;
      break;
    case LemmaId::tech2_phi1:
      num = std::abs(phi1(ThermoSample{rho, r}, p));
      den = far ? growth : diff2;
      break;
    case LemmaId::tech2_phi2:
      num = std::abs(phi2(ThermoSample{rho, r}, p));
      den = far ? growth : diff2;
      break;
    case LemmaId::tech3_phi1:
      num = std::abs(phi1(ThermoSample{rho, r}, p));
      den = h;
      break;
    case LemmaId::tech3_phi2:
      num = std::abs(phi2(ThermoSample{rho, r}, p));
      den = h;
      break;
    case LemmaId::tech4: {
      const double dm = mu_prime(rho, p) - mu_prime(r, p);
      num = rho * dm * dm;
      den = h;
      break;
    }
  }
  if (den < 1e-280) return;  // sample collided with the diagonal
  const double ratio = num / den;
  if (far) {
    out.far = std::max(out.far, ratio);
    ++out.n_far;
  } else {
    out.near = std::max(out.near, ratio);
    ++out.n_near;
  }
}

BranchSups sample_sups(LemmaId id, const SampleRegion& region, const ModelParams& p,
                       int n_samples) {
  LowDiscrepancy seq(2, region.seed);
  BranchSups out;
  for (int i = 0; i < n_samples; ++i) {
    const auto u = seq.next();
    scan_sample(id, p, lerp(region.rho_min, region.rho_max, u[0]),
                lerp(region.r_min, region.r_max, u[1]), out);
  }

  // The sups of these ratios sit on the region edges and on the far-set
  // boundary curves rho = 2r and rho = r/2; bulk sampling alone approaches
  // them too slowly for the refinement-stability verdict to mean anything.
  // Deterministic sweeps hit the curves, the edges and the corners exactly,
  // from both branch sides.
  const int m = std::max(64, n_samples / 8);
  for (int j = 0; j <= m; ++j) {
    const double r = lerp(region.r_min, region.r_max, static_cast<double>(j) / m);
    for (double c : {0.5, 2.0}) {
      for (double side : {1.0, 1.0 - 1e-6, 1.0 + 1e-6}) {
        const double rho = c * r * side;
        if (rho >= region.rho_min && rho <= region.rho_max) scan_sample(id, p, rho, r, out);
      }
    }
    scan_sample(id, p, region.rho_min, r, out);
    scan_sample(id, p, region.rho_max, r, out);
  }
  for (int j = 0; j <= m; ++j) {
    const double rho = lerp(region.rho_min, region.rho_max, static_cast<double>(j) / m);
    scan_sample(id, p, rho, region.r_min, out);
    scan_sample(id, p, rho, region.r_max, out);
  }
  return out;
}

}  // namespace

RatioReport bound_ratios(LemmaId id, const SampleRegion& region, const ModelParams& p,
                         bool enforce_hypotheses) {
  region.validate();
  if (enforce_hypotheses) {
    p.validate();
    if (id == LemmaId::tech1 && !(p.gamma > 1.5)) {
      throw std::invalid_argument("tech1 bound requires gamma > 3/2");
    }
  } else {
    if (!(p.gamma > 1.0) || !std::isfinite(p.gamma) || !std::isfinite(p.s)) {
      throw std::invalid_argument("ratio probe requires finite parameters with gamma > 1");
    }
  }

  const BranchSups base = sample_sups(id, region, p, region.n_samples);
  const BranchSups dbl = sample_sups(id, region, p, 2 * region.n_samples);

  RatioReport rep;
  rep.lemma = id;
  rep.sup_near = base.near;
  rep.sup_far = base.far;
  rep.sup_ratio = std::max(base.near, base.far);
  rep.n_near = base.n_near;
  rep.n_far = base.n_far;
  rep.sup_ratio_doubled = std::max(dbl.near, dbl.far);
  // Nested sampling means the doubled sup can only grow; small growth means
  // the sup is resolved, not still climbing toward a divergence.
  rep.stable = (rep.sup_ratio_doubled - rep.sup_ratio) <= 0.05 * std::max(rep.sup_ratio, 1e-300);
  return rep;
}

double quantum_case_consistency(const SampleRegion& region, const ModelParams& p) {
  region.validate();
  p.validate();
  if (p.s != -1.0) {
    throw std::invalid_argument("quantum collapse requires s = -1");
  }
  LowDiscrepancy seq(2, region.seed);
  double worst = 0.0;
  for (int i = 0; i < region.n_samples; ++i) {
    const auto u = seq.next();
    const double rho = lerp(region.rho_min, region.rho_max, u[0]);
    const double r = lerp(region.r_min, region.r_max, u[1]);
    const ThermoSample ts{rho, r};
    const double h = modulated_enthalpy(ts, p);
    const double scale = std::max(1.0, std::abs(h));
    worst = std::max(worst, std::abs(phi1(ts, p) - (p.gamma - 1.0) * h) / scale);
    worst = std::max(worst, std::abs(phi2(ts, p) + p.gamma * (p.gamma - 1.0) * h) / scale);
  }
  return worst;
}

}  // namespace korteweg
