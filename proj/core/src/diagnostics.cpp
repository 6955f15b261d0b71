#include "korteweg/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace korteweg {

namespace {

Field enthalpy_gap_field(const Field& rho, const Field& r, const ModelParams& p) {
  return zip(rho, r, [&](double a, double b) {
    return modulated_enthalpy(ThermoSample{a, b}, p);
  });
}

Field capillarity_field(const Field& rho, const ModelParams& p) {
  return map(rho, [&](double x) { return capillarity(x, p); });
}

// dx(mu(r) dx f) + 1/2 dx(lambda(r) dx f) with reference-density coefficients.
Field coupling_of(const Field& r, const Field& f, const ModelParams& p) {
  const Field mu_f = apply_mu(r, p);
  const Field lambda_f = apply_lambda(r, p);
  const Field df = deriv(f, 1);
  return deriv(mu_f * df + 0.5 * (lambda_f * df), 1);
}

int snapshot_index(const Trajectory& traj, double t) {
  const auto& ts = traj.times;
  const double span = std::max(1.0, std::abs(ts.back()));
  const auto it = std::lower_bound(ts.begin(), ts.end(), t - 1e-9 * span);
  if (it != ts.end() && std::abs(*it - t) <= 1e-9 * span) {
    return static_cast<int>(it - ts.begin());
  }
  throw std::invalid_argument("relative_entropy_series: t = " + fmt_g17(t) +
                              " is not a recorded time");
}

}  // namespace

EnergyReport energy_euk(const EulerState& st, const ModelParams& p) {
  EnergyReport rep;
  rep.kinetic = 0.5 * quad(st.rho * (st.u * st.u));
  rep.internal = quad(map(st.rho, [&](double x) { return enthalpy(x, p); }));
  const double e2 = p.epsilon * p.epsilon;
  rep.capillary = 0.5 * e2 * quad(st.rho * (st.v * st.v));
  const Field drho = deriv(st.rho, 1);
  rep.capillary_cross = 0.5 * e2 * quad(capillarity_field(st.rho, p) * (drho * drho));
  rep.total = rep.kinetic + rep.internal + rep.capillary;
  return rep;
}

EnergyReport energy_nsk(const NskState& st, const ModelParams& p) {
  EnergyReport rep;
  rep.kinetic = 0.5 * quad(st.rho * (st.w * st.w));
  rep.internal = quad(map(st.rho, [&](double x) { return enthalpy(x, p); }));
  rep.capillary = 0.5 * quad(st.rho * (st.vbar * st.vbar));
  const Field drho = deriv(st.rho, 1);
  rep.capillary_cross = 0.5 * (p.epsilon * p.epsilon - p.nu * p.nu) *
                        quad(capillarity_field(st.rho, p) * (drho * drho));
  rep.total = rep.kinetic + rep.internal + rep.capillary;
  rep.dissipation_rate = nsk_dissipation_rate(st, p);
  return rep;
}

RelEntropyReport relative_entropy_euk(const EulerState& st, const EulerState& ref,
                                      const ModelParams& p) {
  RelEntropyReport rep;
  const Field du = st.u - ref.u;
  const Field dv = st.v - ref.v;
  rep.velocity_gap = 0.5 * quad(st.rho * (du * du));
  rep.drift_gap = 0.5 * p.epsilon * p.epsilon * quad(st.rho * (dv * dv));
  rep.enthalpy_gap = quad(enthalpy_gap_field(st.rho, ref.rho, p));
  rep.value = rep.velocity_gap + rep.drift_gap + rep.enthalpy_gap;
  return rep;
}

RelEntropyReport relative_entropy_nsk(const NskState& st, const NskState& ref,
                                      const ModelParams& p) {
  RelEntropyReport rep;
  const Field dw = st.w - ref.w;
  const Field dvbar = st.vbar - ref.vbar;
  rep.velocity_gap = 0.5 * quad(st.rho * (dw * dw));
  rep.drift_gap = 0.5 * quad(st.rho * (dvbar * dvbar));
  rep.enthalpy_gap = quad(enthalpy_gap_field(st.rho, ref.rho, p));
  rep.value = rep.velocity_gap + rep.drift_gap + rep.enthalpy_gap;
  return rep;
}

double nsk_gradient_gap_rate(const NskState& st, const NskState& ref, const ModelParams& p) {
  const Field dgw = deriv(st.w - ref.w, 1);
  const Field dgv = deriv(st.vbar - ref.vbar, 1);
  const Field mu_f = apply_mu(st.rho, p);
  const Field lambda_f = apply_lambda(st.rho, p);
  return p.nu * quad((mu_f + 0.5 * lambda_f) * (dgw * dgw + dgv * dgv));
}

double relative_entropy_glt(const EulerState& st, const EulerState& ref, const ModelParams& p) {
  const Field du = st.u - ref.u;
  const double velocity_gap = 0.5 * quad(st.rho * (du * du));
  const double enthalpy_gap = quad(enthalpy_gap_field(st.rho, ref.rho, p));

  const Field drho = deriv(st.rho, 1);
  const Field dr = deriv(ref.rho, 1);
  const Field k_rho = capillarity_field(st.rho, p);
  const Field k_r = capillarity_field(ref.rho, p);
  const Field kp_r = map(ref.rho, [&](double x) { return capillarity_prime(x, p); });
  const Field i_t = k_rho * (drho * drho) - k_r * (dr * dr) -
                    kp_r * (dr * dr) * (st.rho - ref.rho) - 2.0 * (k_r * dr * (drho - dr));
  return velocity_gap + 0.5 * p.epsilon * p.epsilon * quad(i_t) + enthalpy_gap;
}

ResidualPair strong_residual_euk(const ReferenceSolution& ref, double t, const ModelParams& p) {
  const Field r = ref.r(t);
  const Field u = ref.U(t);
  const Field v = ref.V(t, p);
  ResidualPair out;
  out.momentum = r * (ref.dU_dt(t) + u * deriv(u, 1)) + deriv(apply_pressure(r, p), 1) -
                 p.epsilon * p.epsilon * coupling_of(r, v, p);
  out.drift = r * (ref.dV_dt(t, p) + u * deriv(v, 1)) + coupling_of(r, u, p);
  return out;
}

ResidualPair strong_residual_nsk(const ReferenceSolution& ref, double t, const ModelParams& p) {
  const double coupling = std::sqrt(p.epsilon * p.epsilon - p.nu * p.nu);
  const Field r = ref.r(t);
  const Field u = ref.U(t);
  const Field w = ref.W(t, p);
  const Field vbar = ref.Vbar(t, p);
  ResidualPair out;
  out.momentum = r * (ref.dW_dt(t, p) + u * deriv(w, 1)) + deriv(apply_pressure(r, p), 1) -
                 p.nu * coupling_of(r, w, p) - coupling * coupling_of(r, vbar, p);
  out.drift = r * (ref.dVbar_dt(t, p) + u * deriv(vbar, 1)) - p.nu * coupling_of(r, vbar, p) +
              coupling * coupling_of(r, w, p);
  return out;
}

std::string to_string(Functional f) {
  switch (f) {
    case Functional::euk: return "euk";
    case Functional::nsk: return "nsk";
    case Functional::glt: return "glt";
  }
  return "unknown";
}

Functional functional_from_string(const std::string& name) {
  if (name == "euk") return Functional::euk;
  if (name == "nsk") return Functional::nsk;
  if (name == "glt") return Functional::glt;
  throw std::invalid_argument("unknown functional: " + name);
}

EulerState euler_view(const State& snapshot, const ModelParams& p) {
  switch (snapshot.model) {
    case ModelKind::euler_korteweg:
      return EulerState{snapshot.rho, snapshot.vel, snapshot.drift};
    case ModelKind::quantum_euler_direct:
      return EulerState{snapshot.rho, snapshot.vel, drift_velocity(snapshot.rho, p)};
    case ModelKind::nsk: {
      const Field v = snapshot.drift *
                      (1.0 / std::sqrt(p.epsilon * p.epsilon - p.nu * p.nu));
      return EulerState{snapshot.rho, snapshot.vel - p.nu * v, v};
    }
  }
  throw std::logic_error("euler_view: unknown model");
}

EntropySeries relative_entropy_series(const Trajectory& traj, const ReferenceSolution& ref,
                                      Functional f, const std::vector<double>& eval_times) {
  if (eval_times.empty()) {
    throw std::invalid_argument("relative_entropy_series: no evaluation times");
  }
  if (f == Functional::nsk && traj.model != ModelKind::nsk) {
    throw std::invalid_argument("relative_entropy_series: nsk functional needs an nsk trajectory");
  }
  const ModelParams& p = traj.params;
  const GridPtr grid = traj.states.front().rho.grid;
  if (!compatible(*ref.grid(), *grid)) {
    throw std::invalid_argument("relative_entropy_series: reference grid differs from the run");
  }

  EntropySeries out;
  out.functional = f;
  double b_cum = 0.0;
  double ti_cum = 0.0;
  double prev_t = 0.0;
  double prev_b_rate = 0.0;
  double prev_ti_rate = 0.0;

  for (std::size_t k = 0; k < eval_times.size(); ++k) {
    const double t = eval_times[k];
    const State& snap = traj.states[snapshot_index(traj, t)];

    double b_rate = 0.0;
    double ti_rate = 0.0;
    RelEntropyReport rep;
    double glt_value = 0.0;

    if (f == Functional::nsk) {
      const NskState st{snap.rho, snap.vel, snap.drift};
      const NskState rf{ref.r(t), ref.W(t, p), ref.Vbar(t, p)};
      rep = relative_entropy_nsk(st, rf, p);
      ti_rate = nsk_gradient_gap_rate(st, rf, p);
      const ResidualPair res = strong_residual_nsk(ref, t, p);
      const Field integrand = (st.rho / rf.rho) *
                              (res.momentum * (rf.w - st.w) + res.drift * (rf.vbar - st.vbar));
      b_rate = quad(integrand);
    } else {
      const EulerState st = euler_view(snap, p);
      const EulerState rf{ref.r(t), ref.U(t), ref.V(t, p)};
      rep = relative_entropy_euk(st, rf, p);
      if (f == Functional::glt) {
        glt_value = relative_entropy_glt(st, rf, p);
        // Keep the shared parts; the capillary part is the modulated-gradient
        // remainder, which may be negative.
        rep.drift_gap = glt_value - rep.velocity_gap - rep.enthalpy_gap;
      }
      const ResidualPair res = strong_residual_euk(ref, t, p);
      const Field combined = res.momentum * (rf.u - st.u) +
                             (p.epsilon * p.epsilon) * (res.drift * (rf.v - st.v));
      b_rate = quad(map(st.rho / rf.rho * combined, [](double x) { return std::abs(x); }));
    }

    if (k > 0) {
      b_cum += 0.5 * (t - prev_t) * (prev_b_rate + b_rate);
      ti_cum += 0.5 * (t - prev_t) * (prev_ti_rate + ti_rate);
    }
    prev_t = t;
    prev_b_rate = b_rate;
    prev_ti_rate = ti_rate;

    out.times.push_back(t);
    out.velocity_gap.push_back(rep.velocity_gap);
    out.drift_gap.push_back(rep.drift_gap);
    out.enthalpy_gap.push_back(rep.enthalpy_gap);
    out.time_integrated_gap.push_back(f == Functional::nsk ? ti_cum : 0.0);
    out.b.push_back(b_cum);
    if (f == Functional::glt) {
      out.value.push_back(glt_value);
    } else if (f == Functional::nsk) {
      out.value.push_back(rep.value + ti_cum);
    } else {
      out.value.push_back(rep.value);
    }
  }
  return out;
}

Certificate gronwall_certify(const std::vector<double>& times, const std::vector<double>& value,
                             const std::vector<double>& b, double C) {
  if (times.size() != value.size() || times.size() != b.size() || times.empty()) {
    throw std::invalid_argument("gronwall_certify: series lengths differ or are empty");
  }
  if (!(C >= 0.0) || !std::isfinite(C)) {
    throw std::invalid_argument("gronwall_certify: C must be finite and >= 0");
  }
  Certificate cert;
  cert.C = C;
  cert.satisfied = true;
  cert.margin = std::numeric_limits<double>::infinity();
  const double e0 = value.front();
  double conv = 0.0;  // int_0^t b(s) exp(-C s) ds, extended by trapezoid
  bool any_scale = false;

  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0) {
      const double dt = times[k] - times[k - 1];
      conv += 0.5 * dt * (b[k - 1] * std::exp(-C * times[k - 1]) + b[k] * std::exp(-C * times[k]));
    }
    const double growth = std::exp(C * times[k]);
    const double bound = e0 * growth + b[k] + C * growth * conv;
    cert.bound.push_back(bound);
    if (value[k] > bound * (1.0 + 1e-9) + 1e-300) cert.satisfied = false;
    // At t = 0 the bound equals the value by construction; the margin is the
    // slack over the later checkpoints.
    if (k == 0 && times.size() > 1) continue;
    const double scale = std::max({std::abs(bound), std::abs(value[k]), 1e-300});
    if (scale > 1e-300) {
      any_scale = true;
      cert.margin = std::min(cert.margin, (bound - value[k]) / scale);
    }
  }
  if (!any_scale || !std::isfinite(cert.margin)) cert.margin = 0.0;
  return cert;
}

double gronwall_threshold(const std::vector<double>& times, const std::vector<double>& value,
                          const std::vector<double>& b, double c_lo, double c_hi) {
  if (!(c_lo >= 0.0) || !(c_hi > c_lo)) {
    throw std::invalid_argument("gronwall_threshold: need 0 <= c_lo < c_hi");
  }
  if (gronwall_certify(times, value, b, c_lo).satisfied) return c_lo;
  if (!gronwall_certify(times, value, b, c_hi).satisfied) {
    return std::numeric_limits<double>::infinity();
  }
  double lo = c_lo, hi = c_hi;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (gronwall_certify(times, value, b, mid).satisfied) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double estimate_gronwall_constant(const ReferenceSolution& ref, const std::vector<double>& times,
                                  const ModelParams& p, double c0, double lemma_constants) {
  double sup = 0.0;
  for (double t : times) {
    const Field u = ref.U(t);
    const Field v = ref.V(t, p);
    const Field du = deriv(u, 1);
    const double g = norm_linf(du) + norm_linf(deriv(v, 1)) + norm_linf(deriv(v, 2)) +
                     norm_linf(du);
    sup = std::max(sup, g);
  }
  return c0 * (1.0 + sup + lemma_constants);
}

double nsk_certificate_constant(double C, const ModelParams& p) {
  p.validate_nsk();
  return C * (1.0 + p.nu / (p.epsilon * p.epsilon - p.nu * p.nu));
}

}  // namespace korteweg
