#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "korteweg/lemma_suite.hpp"

using namespace korteweg;

namespace {

ModelParams params(double gamma, double s) {
  ModelParams p;
  p.gamma = gamma;
  p.s = s;
  p.epsilon = 0.5;
  return p;
}

SampleRegion small_region() {
  SampleRegion r;
  r.n_samples = 2000;
  return r;
}

}  // namespace

TEST_CASE("sample region validation") {
  SampleRegion r;
  CHECK_NOTHROW(r.validate());
  r.rho_min = 0.0;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  r = SampleRegion{};
  r.r_max = r.r_min;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
  r = SampleRegion{};
  r.n_samples = 0;
  CHECK_THROWS_AS(r.validate(), std::invalid_argument);
}

TEST_CASE("low discrepancy stream is deterministic, nested, and in range") {
  LowDiscrepancy a(2, 7);
  LowDiscrepancy b(2, 7);
  std::vector<std::vector<double>> first;
  for (int k = 0; k < 100; ++k) {
    const auto pa = a.next();
    const auto pb = b.next();
    REQUIRE(pa.size() == 2);
    CHECK(pa == pb);
    for (double x : pa) {
      CHECK(x >= 0.0);
      CHECK(x < 1.0);
    }
    first.push_back(pa);
  }
  // Restarting reproduces the same prefix: refinement is nested.
  LowDiscrepancy c(2, 7);
  for (int k = 0; k < 50; ++k) CHECK(c.next() == first[k]);
  // A different seed decorrelates the stream.
  LowDiscrepancy d(2, 8);
  CHECK(d.next() != first[0]);
}

TEST_CASE("far field partition") {
  CHECK(far_field(1.0, 4.0));
  CHECK(far_field(4.0, 1.0));
  CHECK(!far_field(1.0, 1.0));
  CHECK(!far_field(1.9, 1.0));
  CHECK(far_field(2.0, 1.0));   // boundary belongs to the far set
  CHECK(far_field(0.5, 1.0));
}

TEST_CASE("modulated pressure pairing identity") {
  for (const ModelParams p : {params(2.0, -1.0), params(3.0, 0.0), params(2.5, 0.5)}) {
    CHECK(identity_modulated_pressure(small_region(), p) <= 1e-12);
  }
}

TEST_CASE("pairing identity hand case") {
  // gamma = 2, s = -1 at rho = 2, r = 1, v = 3, V = 1.
  // lhs = rho (phi'(mu(rho)) v - phi'(mu(r)) V)(v - V)
  //     = 2 (2*2*3 - 2*1*1)(3 - 1) = 40.
  // rhs = (grad_phi1 + phi2 V) V + rho phi'(mu(rho)) |V - v|^2
  //     = (10 + (-2)*1)*1 + 2*4*4 = 40.
  const ModelParams p = params(2.0, -1.0);
  const double rho = 2.0, r = 1.0, v = 3.0, V = 1.0;
  const double lhs =
      rho * (phi_prime(mu(rho, p), p) * v - phi_prime(mu(r, p), p) * V) * (v - V);
  // grad_phi1 via the chain rule; the drift carriers stand in for the gradients:
  // rho v = grad mu(rho), r V = grad mu(r).
  const double grad_mu_rho = rho * v;
  const double grad_mu_r = r * V;
  const double grad_phi1 = phi_prime(mu(rho, p), p) * grad_mu_rho -
                           phi_prime(mu(r, p), p) * grad_mu_r -
                           phi_second(mu(r, p), p) * (mu(rho, p) - mu(r, p)) * grad_mu_r -
                           phi_prime(mu(r, p), p) * (grad_mu_rho - grad_mu_r);
  const double phi2v = phi2(ThermoSample{rho, r}, p);
  const double rhs = (grad_phi1 + phi2v * V) * V +
                     rho * phi_prime(mu(rho, p), p) * (V - v) * (V - v);
  CHECK(lhs == doctest::Approx(40.0).epsilon(1e-14));
  CHECK(rhs == doctest::Approx(40.0).epsilon(1e-14));
}

TEST_CASE("pairing identity on sampled density profiles") {
  const GridPtr g = make_grid(256, 2.0 * Grid::pi());
  const Field rho = Field::sample(g, [](double x) { return 1.5 + 0.5 * std::sin(x); });
  const Field r = Field::sample(g, [](double x) { return 1.2 + 0.3 * std::cos(2.0 * x); });
  for (const ModelParams p : {params(2.0, -1.0), params(3.0, 0.0)}) {
    CHECK(identity_modulated_pressure_fields(rho, r, p) <= 1e-8);
  }
}

TEST_CASE("two modulated capillarity forms are algebraically equivalent") {
  for (const ModelParams p : {params(2.0, -1.0), params(3.0, 0.0), params(3.0, 1.0)}) {
    CHECK(identity_glt_equivalence(small_region(), p) <= 1e-12);
  }
}

TEST_CASE("capillarity form hand case") {
  // s = -1: K = 1/rho, at rho = 4, r = 1, drho = 2, dr = 1.
  // I_euk = 2/2 - 2*1 = -1, I3 = sqrt(K(r)/K(rho)) - sqrt(rho/r) = 2 - 2 = 0,
  // Bregman of 1/K = rho at (4,1) is 0, so lhs = I_euk^2 + 0 - 0 = 1 and
  // rhs = I_T + 2 sqrt(K(r)) dr I_euk I3 = I_T with
  // I_T = 4/4 - 1 - K'(1)*1*(4-1) - 2*1*1*(2-1) = 1 - 1 + 3 - 2 = 1.
  const ModelParams p = params(2.0, -1.0);
  const double rho = 4.0, r = 1.0, drho = 2.0, dr = 1.0;
  const double i_euk = std::sqrt(capillarity(rho, p)) * drho -
                       std::sqrt(rho / r) * std::sqrt(capillarity(r, p)) * dr;
  const double i3 =
      std::sqrt(capillarity(r, p) / capillarity(rho, p)) - std::sqrt(rho / r);
  const double i_t = capillarity(rho, p) * drho * drho - capillarity(r, p) * dr * dr -
                     capillarity_prime(r, p) * dr * dr * (rho - r) -
                     2.0 * capillarity(r, p) * dr * (drho - dr);
  CHECK(i_euk == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(i3 == 0.0);
  CHECK(i_t == doctest::Approx(1.0).epsilon(1e-14));
  const double lhs = i_euk * i_euk;
  const double rhs = i_t + 2.0 * std::sqrt(capillarity(r, p)) * dr * i_euk * i3;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
}

TEST_CASE("bounding ratios: closed-form suprema") {
  SampleRegion region;
  region.rho_min = 0.85;
  region.rho_max = 1.25;
  region.r_min = 0.85;
  region.r_max = 1.25;
  region.n_samples = 4000;

  // At s = -1, phi1 = (gamma-1) H(rho|r), so the tech3 ratio is gamma-1.
  for (double gamma : {2.0, 3.0}) {
    const RatioReport rep = bound_ratios(LemmaId::tech3_phi1, region, params(gamma, -1.0));
    CHECK(std::abs(rep.sup_ratio - (gamma - 1.0)) <= 1e-12);
    CHECK(rep.stable);
  }

  // mu'(rho) = 1 for all rho at s = -1, so the tech4 numerator vanishes.
  const RatioReport t4 = bound_ratios(LemmaId::tech4, region, params(2.0, -1.0));
  CHECK(t4.sup_ratio == 0.0);
}

TEST_CASE("bounding ratios: default-region corner values") {
  // tech1 near branch peaks at the (rho, r) = (0.1ish, 2) style corners where
  // H(rho|r) is smallest relative to (rho-r)^2; the measured default-region
  // sup is rho-independent of the sampler details to ~1e-3 but pinned loosely.
  const RatioReport rep = bound_ratios(LemmaId::tech1, SampleRegion{}, params(2.0, -1.0));
  CHECK(rep.sup_ratio == doctest::Approx(25.0).epsilon(1e-2));
  CHECK(rep.n_near > 0);
  CHECK(rep.n_far > 0);
  CHECK(rep.sup_ratio_doubled >= rep.sup_ratio);
  CHECK(rep.stable);

  const RatioReport rep3 = bound_ratios(LemmaId::tech1, SampleRegion{}, params(3.0, -1.0));
  CHECK(rep3.sup_ratio == doctest::Approx(50.0).epsilon(1e-2));
}

TEST_CASE("bounding ratios: hypothesis enforcement and negative control") {
  CHECK_THROWS_AS(bound_ratios(LemmaId::tech1, SampleRegion{}, params(1.4, -1.0)),
                  std::invalid_argument);

  // Out of hypothesis (gamma < s + 2) the tech4 ratio grows like
  // rho^{s+2-gamma}; stretching the density range must blow the sup up.
  SampleRegion narrow;
  narrow.rho_min = 0.5;
  narrow.rho_max = 2.0;
  narrow.n_samples = 4000;
  SampleRegion wide = narrow;
  wide.rho_max = 200.0;
  const ModelParams p = params(1.5, 1.0);
  const RatioReport a = bound_ratios(LemmaId::tech4, narrow, p, false);
  const RatioReport b = bound_ratios(LemmaId::tech4, wide, p, false);
  CHECK(b.sup_ratio >= 10.0 * a.sup_ratio);
}

TEST_CASE("quantum collapse of the modulated weights") {
  CHECK(quantum_case_consistency(small_region(), params(2.0, -1.0)) <= 1e-12);
  CHECK(quantum_case_consistency(small_region(), params(3.0, -1.0)) <= 1e-12);
  CHECK_THROWS_AS(quantum_case_consistency(small_region(), params(3.0, 0.0)),
                  std::invalid_argument);
}
