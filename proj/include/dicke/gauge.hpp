#pragma once

// Reduced parameter point and the alpha-gauge couplings of the Dicke model.
//
// The charge, mass and density are eliminated in favour of eta, beta and the
// dipole energy scale E:
//   rho d^2    = eta^2 omega^2 zeta01^2 / E
//   d sqrt(rho) = eta omega |zeta01| / sqrt(E)

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dicke/dipole.hpp"
#include "dicke/errors.hpp"

namespace dicke {

struct ReducedParams {
  double omega = 1.0;        ///< cavity frequency (energy unit)
  double beta = 0.0;         ///< double-well shape
  double energy_scale = 1.0; ///< E = 1/(m r0^2)
  double eta = 0.0;          ///< gauge-invariant coupling
  int n_dipoles = 1;
  double alpha = 1.0;        ///< gauge parameter
  DipoleSpectrum spectrum;   ///< single-dipole levels, at least two

  void validate() const {
    if (!(omega > 0.0) || !std::isfinite(omega))
      throw ValidationError("ReducedParams: omega must be positive");
    if (!(energy_scale > 0.0) || !std::isfinite(energy_scale))
      throw ValidationError("ReducedParams: energy_scale must be positive");
    if (!(eta >= 0.0) || !std::isfinite(eta))
      throw ValidationError("ReducedParams: eta must be finite and >= 0");
    if (n_dipoles < 1)
      throw ValidationError("ReducedParams: n_dipoles must be >= 1");
    if (!std::isfinite(alpha))
      throw ValidationError("ReducedParams: alpha must be finite");
    if (spectrum.levels() < 2)
      throw ValidationError("ReducedParams: spectrum needs at least two levels");
    if (std::abs(spectrum.energy_scale - energy_scale) > 1e-12 * energy_scale)
      throw ValidationError("ReducedParams: spectrum solved at a different energy scale");
  }

  double omega_m() const { return spectrum.transition_frequency(); }
  double zeta01() const { return std::abs(spectrum.dipole_element()); }
  double rho_d2() const { return eta * eta * omega * omega * zeta01() * zeta01() / energy_scale; }
  double d_sqrt_rho() const { return eta * omega * zeta01() / std::sqrt(energy_scale); }

  ReducedParams with_eta(double e) const {
    ReducedParams p = *this;
    p.eta = e;
    return p;
  }
  ReducedParams with_alpha(double a) const {
    ReducedParams p = *this;
    p.alpha = a;
    return p;
  }
};

/// Parameter point at resonance (omega_m = omega) for the main-text dipole.
inline ReducedParams resonant_params(double beta, double eta, double alpha, int n_dipoles,
                                     int levels = 2, double omega = 1.0,
                                     const GridSpec &grid = {}) {
  ReducedParams p;
  p.omega = omega;
  p.beta = beta;
  p.energy_scale = resonance_energy_scale(beta, omega, grid);
  p.eta = eta;
  p.alpha = alpha;
  p.n_dipoles = n_dipoles;
  p.spectrum = solve_double_well({beta, p.energy_scale, MainText{}}, grid, std::max(levels, 2));
  p.validate();
  return p;
}

struct CouplingSet {
  double omega_alpha = 0.0;
  double c_alpha = 0.0;
  double g_alpha = 0.0;
  double g_prime_alpha = 0.0;
  double tau = 0.0; ///< omega_m / (2 rho d^2); +inf at eta = 0
  double rho_d2 = 0.0;
  double omega_m = 0.0;
  double alpha = 0.0;
};

inline double omega_alpha(double omega, double eta, double alpha) {
  const double x = eta * (1.0 - alpha);
  return omega * std::sqrt(1.0 + x * x);
}

inline CouplingSet derive_couplings(const ReducedParams &p) {
  p.validate();
  CouplingSet c;
  c.omega_m = p.omega_m();
  c.alpha = p.alpha;
  c.rho_d2 = p.rho_d2();
  c.omega_alpha = omega_alpha(p.omega, p.eta, p.alpha);
  c.c_alpha = 0.5 * c.rho_d2 * (1.0 - p.alpha * p.alpha);
  const double dr = p.d_sqrt_rho();
  c.g_alpha = p.alpha * dr * std::sqrt(0.5 * c.omega_alpha);
  c.g_prime_alpha = (1.0 - p.alpha) * c.omega_m * dr / std::sqrt(2.0 * c.omega_alpha);
  c.tau = c.rho_d2 > 0.0 ? c.omega_m / (2.0 * c.rho_d2)
                         : std::numeric_limits<double>::infinity();
  return c;
}

/// Critical coupling eta_c = sqrt(omega_m E / (2 omega^2 zeta01^2)), where tau = 1.
inline double critical_eta(const ReducedParams &p) {
  const double z = p.zeta01();
  if (!(z > 0.0))
    throw DegenerateError("critical_eta: vanishing transition dipole");
  return std::sqrt(p.omega_m() * p.energy_scale / (2.0 * p.omega * p.omega * z * z));
}

/// Root alpha in [0, 1] of alpha omega_alpha(alpha) = (1 - alpha) omega_m,
/// where g_alpha = g'_alpha and the counter-rotating couplings cancel.
inline double jc_gauge(const ReducedParams &p, double tol = 1e-12) {
  p.validate();
  const double wm = p.omega_m();
  auto f = [&](double a) { return a * omega_alpha(p.omega, p.eta, a) - (1.0 - a) * wm; };
  double lo = 0.0, hi = 1.0;
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0)
    return lo;
  if (flo * fhi > 0.0) {
    std::ostringstream msg;
    msg << "jc_gauge: no sign change on [0,1] (f(0)=" << flo << ", f(1)=" << fhi << ")";
    throw RootError(msg.str());
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0)
      return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// n=1 term of the f-sum: 2 (e1 - e0) zeta01^2 <= 1, i.e. eta^2 omega^2 >= 2 omega_m rho d^2.
inline bool trk_bound_holds(const ReducedParams &p) {
  const DipoleSpectrum &s = p.spectrum;
  if (s.levels() < 2)
    return false;
  const double z = s.zeta(0, 1);
  return 2.0 * (s.dimensionless(1) - s.dimensionless(0)) * z * z <= 1.0;
}

} // namespace dicke
