#pragma once

// Thermodynamic limit of the alpha-gauge Dicke model in the normal (tau > 1)
// and abnormal (tau < 1) phases, tau = omega_m / (2 rho d^2).
//
// Ground energy densities are reported per dipole, relative to eps0 and with
// the rho d^2 / 2 shift removed (G_s = G - rho d^2 / 2). The O(1) remainder
// of G_s (zero-point energy and constant terms) is kept separately in
// finite_size_offset so that ground_density_at(point, N) reproduces G_s / N.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dicke/errors.hpp"
#include "dicke/gauge.hpp"
#include "dicke/oscdiag.hpp"

namespace dicke {

enum class Phase { Normal, Critical, Abnormal };

inline const char *to_string(Phase p) {
  switch (p) {
  case Phase::Normal:
    return "normal";
  case Phase::Critical:
    return "critical";
  case Phase::Abnormal:
    return "abnormal";
  }
  return "?";
}

struct PhasePoint {
  Phase phase = Phase::Normal;
  double tau = 0.0;
  double e_plus = 0.0;
  double e_minus = 0.0;
  double ground_density = 0.0;     ///< N-leading (G_s / N - eps0)
  double finite_size_offset = 0.0; ///< O(1) part of G_s - N eps0
  double pi_average = 0.0;         ///< d <Pi_alpha>
  double p_t_average = 0.0;        ///< d <P_T alpha>
  double renormalized_material_frequency = 0.0;
};

/// G_s / N - eps0 at finite N, including the O(1/N) terms.
inline double ground_density_at(const PhasePoint &p, int n_dipoles) {
  return p.ground_density + p.finite_size_offset / n_dipoles;
}

inline constexpr double kCriticalTol = 1e-9;

/// Normal iff omega_m - 2 rho d^2 > tol omega_m, Abnormal iff < -tol omega_m.
inline Phase classify(const CouplingSet &c, double tol = kCriticalTol) {
  const double s = c.omega_m - 2.0 * c.rho_d2;
  if (s > tol * c.omega_m)
    return Phase::Normal;
  if (s < -tol * c.omega_m)
    return Phase::Abnormal;
  return Phase::Critical;
}

namespace detail {

// Solve the bilinear form whose first oscillator has frequency w, with
// couplings already rescaled. w = 0 only occurs at alpha = 0 on the critical
// point, where the rescaled coupling g vanishes and the modes decouple.
inline PolaritonPair solve_renormalized(double w, double w_prime, double g, double g_prime,
                                        const char *who) {
  if (w <= 0.0) {
    if (g != 0.0)
      throw InstabilityError(std::string(who) + ": material frequency vanished at finite coupling");
    return {w_prime, 0.0, 0.0};
  }
  return polariton_closed_form({w, w_prime, g, g_prime, 0.0});
}

} // namespace detail

inline PhasePoint normal_phase(const CouplingSet &c) {
  if (c.tau < 1.0 - kCriticalTol) {
    std::ostringstream msg;
    msg << "normal_phase: tau = " << c.tau << " < 1";
    throw PhaseError(msg.str());
  }
  const double wm = c.omega_m;
  const double wt2 = wm * (wm - 4.0 * c.c_alpha);
  const double wt = std::sqrt(std::max(wt2, 0.0));
  const double g = wt > 0.0 ? std::sqrt(wm / wt) * c.g_alpha : (c.g_alpha == 0.0 ? 0.0 : NAN);
  const double gp = std::sqrt(wt / wm) * c.g_prime_alpha;
  if (std::isnan(g))
    throw InstabilityError("normal_phase: renormalised material frequency vanished");
  const PolaritonPair e = detail::solve_renormalized(wt, c.omega_alpha, g, gp, "normal_phase");

  PhasePoint p;
  p.phase = classify(c) == Phase::Critical ? Phase::Critical : Phase::Normal;
  p.tau = c.tau;
  p.e_plus = e.e_plus;
  p.e_minus = e.e_minus;
  p.ground_density = 0.0;
  // C^n = N eps0 + (rho d^2 - omega_m)/2, minus the rho d^2 / 2 shift
  p.finite_size_offset = 0.5 * (e.e_plus + e.e_minus) - 0.5 * wm;
  p.renormalized_material_frequency = wt;
  return p;
}

inline PhasePoint abnormal_phase(const CouplingSet &c) {
  if (c.tau > 1.0 + kCriticalTol) {
    std::ostringstream msg;
    msg << "abnormal_phase: tau = " << c.tau << " > 1";
    throw PhaseError(msg.str());
  }
  const double wm = c.omega_m;
  const double tau = c.tau;
  const double a2 = c.alpha * c.alpha;
  const double wu2 = (wm * wm / (tau * tau)) * (1.0 - (1.0 - a2) * tau * tau);
  const double wu = std::sqrt(std::max(wu2, 0.0));
  const double gp = std::sqrt(tau * wu / wm) * c.g_prime_alpha;
  const double g = wu > 0.0 ? std::sqrt(tau * wm / wu) * c.g_alpha : (c.g_alpha == 0.0 ? 0.0 : NAN);
  if (std::isnan(g))
    throw InstabilityError("abnormal_phase: renormalised material frequency vanished");
  const PolaritonPair e = detail::solve_renormalized(wu, c.omega_alpha, g, gp, "abnormal_phase");

  PhasePoint p;
  p.phase = classify(c) == Phase::Critical ? Phase::Critical : Phase::Abnormal;
  p.tau = tau;
  p.e_plus = e.e_plus;
  p.e_minus = e.e_minus;
  const double one_minus = 1.0 - tau;
  p.ground_density = -wm * one_minus * one_minus / (4.0 * tau);
  // C^a carries -rho d^2 / 2, minus the rho d^2 / 2 shift
  p.finite_size_offset = 0.5 * (e.e_plus + e.e_minus) - c.rho_d2;
  p.pi_average = c.alpha * c.rho_d2 * std::sqrt(std::max(1.0 - tau * tau, 0.0));
  p.p_t_average = 0.0 - p.pi_average; // no negative zero
  p.renormalized_material_frequency = wu;
  return p;
}

/// Phase-appropriate branch; the critical point is evaluated on the normal branch.
inline PhasePoint evaluate(const CouplingSet &c) {
  return classify(c) == Phase::Abnormal ? abnormal_phase(c) : normal_phase(c);
}

inline PhasePoint evaluate(const ReducedParams &p) { return evaluate(derive_couplings(p)); }

/// Signed E-^2 of the normal branch, analytic in the renormalised frequency
/// squared and therefore continued through tau = 1 with a sign change there.
inline double normal_branch_e_minus_squared(const CouplingSet &c) {
  const double wm = c.omega_m;
  const double wa = c.omega_alpha;
  const double wt2 = wm * (wm - 4.0 * c.c_alpha);
  const double wa2 = wa * wa;
  const double gg = c.g_alpha * c.g_prime_alpha;
  const double s = 8.0 * gg + wt2 + wa2;
  const double d = (wt2 - wa2) * (wt2 - wa2) +
                   16.0 * ((wt2 + wa2) * gg +
                           wa * (wt2 * c.g_prime_alpha * c.g_prime_alpha / wm +
                                 wm * c.g_alpha * c.g_alpha));
  return 0.5 * (s - std::sqrt(std::max(d, 0.0)));
}

/// Coupling in [lo, hi] where the normal-branch E-^2 changes sign (bisection).
inline double soft_mode_eta(const ReducedParams &p, double lo, double hi, double tol = 1e-13) {
  auto f = [&](double eta) { return normal_branch_e_minus_squared(derive_couplings(p.with_eta(eta))); };
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo * fhi > 0.0)
    throw RootError("soft_mode_eta: E-^2 does not change sign on the bracket");
  while (hi - lo > tol * std::max(1.0, hi)) {
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

/// Closed-form (1/N) d^2 G_s / d eta^2: 0 in the normal phase,
/// -omega_m [1/(2 eta_c^2) + 3 eta_c^2 / (2 eta^4)] in the abnormal phase.
inline double analytic_second_derivative(double eta, double eta_c, double omega_m) {
  if (eta <= eta_c)
    return 0.0;
  const double c = eta_c * eta_c;
  const double e4 = eta * eta * eta * eta;
  return -omega_m * (0.5 / c + 1.5 * c / e4);
}

struct CurvatureSample {
  double eta = 0.0;
  std::optional<double> value;  ///< Richardson finite difference; empty when tagged
  double analytic = 0.0;
  bool near_critical = false;   ///< stencil would straddle eta_c
};

/// (1/N) d^2 G_s / d eta^2 of the N-leading ground density by Richardson-
/// extrapolated central differences. Points closer than `step` to eta_c are
/// tagged and not differentiated.
inline std::vector<CurvatureSample>
ground_density_second_derivative(const ReducedParams &params, const std::vector<double> &eta_grid,
                                 double step = 1e-3) {
  if (!(step > 0.0) || !std::isfinite(step))
    throw GridError("ground_density_second_derivative: step must be positive");
  for (std::size_t i = 0; i < eta_grid.size(); ++i) {
    if (!std::isfinite(eta_grid[i]) || eta_grid[i] < 0.0)
      throw GridError("ground_density_second_derivative: invalid eta value");
    if (i && !(eta_grid[i] > eta_grid[i - 1]))
      throw GridError("ground_density_second_derivative: eta grid must be strictly increasing");
  }
  const double eta_c = critical_eta(params);
  const double wm = params.omega_m();
  // G_s depends on eta^2 only, so the stencil may reach below eta = 0
  auto f = [&](double eta) { return evaluate(params.with_eta(std::abs(eta))).ground_density; };

  std::vector<CurvatureSample> out;
  out.reserve(eta_grid.size());
  for (double eta : eta_grid) {
    CurvatureSample s;
    s.eta = eta;
    s.analytic = analytic_second_derivative(eta, eta_c, wm);
    if (std::abs(eta - eta_c) <= step) {
      s.near_critical = true;
      out.push_back(s);
      continue;
    }
    const double f0 = f(eta);
    auto d2 = [&](double h) { return (f(eta + h) - 2.0 * f0 + f(eta - h)) / (h * h); };
    s.value = (4.0 * d2(0.5 * step) - d2(step)) / 3.0;
    out.push_back(s);
  }
  return out;
}

} // namespace dicke
