#include <catch_amalgamated.hpp>

#include <cmath>

#include "dicke/gauge.hpp"

using namespace dicke;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const ReducedParams &resonant(double beta) {
  static const ReducedParams p15 = resonant_params(1.5, 0.0, 1.0, 1, 4);
  static const ReducedParams p24 = resonant_params(2.4, 0.0, 1.0, 1, 4);
  static const ReducedParams p33 = resonant_params(3.3, 0.0, 1.0, 1, 4);
  return beta == 1.5 ? p15 : beta == 2.4 ? p24 : p33;
}

// <0|zeta|1> by direct quadrature of the stored wavefunctions.
double zeta01_quadrature(const DipoleSpectrum &s) {
  return s.wavefunctions.col(0).dot(s.grid.cwiseProduct(s.wavefunctions.col(1)));
}

} // namespace

TEST_CASE("multipolar and Coulomb identities") {
  for (double eta : {0.0, 0.3, 1.0, 2.5}) {
    const CouplingSet m = derive_couplings(resonant(2.4).with_eta(eta).with_alpha(1.0));
    CHECK(m.omega_alpha == 1.0);
    CHECK(m.c_alpha == 0.0);
    CHECK(m.g_prime_alpha == 0.0);
    const CouplingSet c = derive_couplings(resonant(2.4).with_eta(eta).with_alpha(0.0));
    CHECK(c.g_alpha == 0.0);
    CHECK_THAT(c.c_alpha, WithinAbs(0.5 * c.rho_d2, 1e-15));
    CHECK_THAT(c.omega_alpha * c.omega_alpha, WithinRel(1.0 + eta * eta, 1e-14));
  }
}

TEST_CASE("tau = 1 at the critical coupling") {
  const ReducedParams &p = resonant(2.4);
  const double eta_c = critical_eta(p);
  const CouplingSet c = derive_couplings(p.with_eta(eta_c));
  CHECK_THAT(c.tau, WithinAbs(1.0, 1e-12));
  // independent rho d^2 from a quadrature of the wavefunctions
  const double z = zeta01_quadrature(p.spectrum);
  const double rd2 = eta_c * eta_c * z * z / p.energy_scale;
  CHECK_THAT(p.omega_m() / (2.0 * rd2), WithinAbs(1.0, 1e-10));
  CHECK(std::isinf(derive_couplings(p.with_eta(0.0)).tau));
  CHECK_THAT(derive_couplings(p.with_eta(2.0 * eta_c)).tau, WithinAbs(0.25, 1e-12));
}

TEST_CASE("coupling invariants over alpha and eta") {
  const ReducedParams &p = resonant(3.3);
  REQUIRE(trk_bound_holds(p));
  for (double eta : {0.1, 0.7, 2.0, 4.0}) {
    const double tau0 = derive_couplings(p.with_eta(eta).with_alpha(0.0)).tau;
    for (double alpha = -0.5; alpha <= 1.5; alpha += 0.125) {
      const CouplingSet c = derive_couplings(p.with_eta(eta).with_alpha(alpha));
      CHECK(c.tau == tau0);
      CHECK(c.omega_alpha >= 1.0);
      const double chain = 1.0 + 2.0 * c.omega_m * c.rho_d2 * (1.0 - alpha) * (1.0 - alpha);
      CHECK(c.omega_alpha * c.omega_alpha >= chain - 1e-12);
      CHECK_THAT(c.c_alpha, WithinAbs(0.5 * c.rho_d2 * (1.0 - alpha * alpha), 1e-14));
    }
  }
}

TEST_CASE("couplings are smooth in alpha") {
  const ReducedParams p = resonant(2.4).with_eta(0.9);
  const double dr = p.d_sqrt_rho();
  const double wm = p.omega_m();
  const double eta = p.eta;
  for (double alpha : {0.1, 0.4, 0.8}) {
    const double h = 1e-5;
    const CouplingSet c = derive_couplings(p.with_alpha(alpha));
    const CouplingSet up = derive_couplings(p.with_alpha(alpha + h));
    const CouplingSet dn = derive_couplings(p.with_alpha(alpha - h));
    const double wa = c.omega_alpha;
    const double dwa = -eta * eta * (1.0 - alpha) / wa;
    const double dg = dr * std::sqrt(0.5 * wa) + alpha * dr * dwa / (2.0 * std::sqrt(2.0 * wa));
    const double dgp = -wm * dr / std::sqrt(2.0 * wa) -
                       (1.0 - alpha) * wm * dr * dwa / (2.0 * std::sqrt(2.0) * std::pow(wa, 1.5));
    CHECK_THAT((up.omega_alpha - dn.omega_alpha) / (2.0 * h), WithinAbs(dwa, 1e-6));
    CHECK_THAT((up.g_alpha - dn.g_alpha) / (2.0 * h), WithinAbs(dg, 1e-6));
    CHECK_THAT((up.g_prime_alpha - dn.g_prime_alpha) / (2.0 * h), WithinAbs(dgp, 1e-6));
  }
}

TEST_CASE("Jaynes-Cummings gauge") {
  const ReducedParams &p = resonant(2.4);
  CHECK_THAT(jc_gauge(p.with_eta(0.0)), WithinAbs(0.5, 1e-9));
  double previous = 1.0;
  for (int i = 0; i <= 40; ++i) {
    const ReducedParams q = p.with_eta(0.05 * i);
    const double a = jc_gauge(q);
    CHECK(a <= previous);
    CHECK(a > 0.0);
    previous = a;
    const CouplingSet c = derive_couplings(q.with_alpha(a));
    CHECK_THAT(c.g_alpha, WithinAbs(c.g_prime_alpha, 1e-10));
  }
  // omega_m -> 0 forces alpha omega_alpha -> 0
  ReducedParams soft = p.with_eta(1.0);
  soft.spectrum.energies[1] = soft.spectrum.energies[0] + 1e-9;
  CHECK(jc_gauge(soft) < 1e-8);
  ReducedParams flat = soft;
  flat.spectrum.energies[1] = flat.spectrum.energies[0];
  CHECK(jc_gauge(flat) == 0.0);
}

TEST_CASE("TRK bound") {
  CHECK(trk_bound_holds(resonant(3.3)));
  CHECK(trk_bound_holds(resonant(1.5)));
  ReducedParams inflated = resonant(3.3);
  inflated.spectrum.zeta(0, 1) *= 3.0;
  inflated.spectrum.zeta(1, 0) *= 3.0;
  CHECK_FALSE(trk_bound_holds(inflated));
}

TEST_CASE("parameter validation") {
  ReducedParams p = resonant(2.4);
  p.eta = -1.0;
  CHECK_THROWS_AS(derive_couplings(p), ValidationError);
  p = resonant(2.4);
  p.energy_scale *= 2.0;
  CHECK_THROWS_AS(derive_couplings(p), ValidationError);
  p = resonant(2.4);
  p.n_dipoles = 0;
  CHECK_THROWS_AS(jc_gauge(p), ValidationError);
}
