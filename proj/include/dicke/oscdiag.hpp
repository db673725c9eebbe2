#pragma once

// Diagonalisation of the generic bilinear two-oscillator Hamiltonian
//
//   h = w y'y + w' z'z + i g (y' + y)(z' - z) - i g' (y' - y)(z' + z) + C
//
// (primes on operators denote adjoints). Two independent routes are
// provided: the closed-form polariton energies and the symplectic
// (Williamson) eigenvalues of the quadrature matrix M.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Dense>

#include "dicke/errors.hpp"

namespace dicke {

struct BilinearForm {
  double w = 1.0;       ///< first-oscillator frequency
  double w_prime = 1.0; ///< second-oscillator frequency
  double g = 0.0;       ///< q_y p_z coupling
  double g_prime = 0.0; ///< p_y q_z coupling
  double c = 0.0;       ///< additive constant
};

struct PolaritonPair {
  double e_plus = 0.0;
  double e_minus = 0.0;
  /// Vacuum energy of h: (E+ + E- - w - w')/2 + C.
  double ground_shift = 0.0;
};

namespace detail {

inline void check_form(const BilinearForm &f) {
  if (!(std::isfinite(f.w) && std::isfinite(f.w_prime) && std::isfinite(f.g) &&
        std::isfinite(f.g_prime) && std::isfinite(f.c)))
    throw ValidationError("BilinearForm: non-finite field");
  if (!(f.w > 0.0 && f.w_prime > 0.0))
    throw ValidationError("BilinearForm: oscillator frequencies must be positive");
}

// Relative size below which 2E-^2 is treated as the stability boundary.
inline constexpr double kBoundaryTol = 1e-12;

inline PolaritonPair make_pair(const BilinearForm &f, double ep, double em) {
  return {ep, em, 0.5 * (ep + em - f.w - f.w_prime) + f.c};
}

} // namespace detail

/// 4x4 matrix M with h = r^T M r + C - (w + w')/2, r = (q_y, q_z, p_y, p_z).
inline Eigen::Matrix4d quadrature_matrix(const BilinearForm &f) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = f.w;
  m(1, 1) = f.w_prime;
  m(2, 2) = f.w;
  m(3, 3) = f.w_prime;
  m(0, 3) = m(3, 0) = 2.0 * f.g;
  m(1, 2) = m(2, 1) = -2.0 * f.g_prime;
  return 0.5 * m;
}

/// Standard symplectic form [[0, I], [-I, 0]] on R^4.
inline Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d omega = Eigen::Matrix4d::Zero();
  omega.topRightCorner<2, 2>().setIdentity();
  omega.bottomLeftCorner<2, 2>() = -Eigen::Matrix2d::Identity();
  return omega;
}

/// True iff every eigenvalue of M exceeds rel_tol * max(w, w').
inline bool is_positive_definite(const BilinearForm &f, double rel_tol = 1e-12) {
  if (!(std::isfinite(f.w) && std::isfinite(f.w_prime) && std::isfinite(f.g) &&
        std::isfinite(f.g_prime)))
    return false;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(quadrature_matrix(f),
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() > rel_tol * std::max(f.w, f.w_prime);
}

/// Closed-form polariton energies
///   2E+-^2 = 8gg' + w^2 + w'^2 +- sqrt((w^2 - w'^2)^2 + 16(wg' + w'g)(wg + w'g')).
/// Throws InstabilityError when the form is not positive-definite; exactly on
/// the boundary (2E-^2 = 0 to rounding) E- = 0 is returned.
inline PolaritonPair polariton_closed_form(const BilinearForm &f) {
  detail::check_form(f);
  // M splits into two 2x2 blocks: positive iff 4 max(g^2, g'^2) < w w'
  const double ww = f.w * f.w_prime;
  const double strongest = 4.0 * std::max(f.g * f.g, f.g_prime * f.g_prime);
  if (strongest - ww > detail::kBoundaryTol * std::max(ww, strongest)) {
    std::ostringstream msg;
    msg << "polariton_closed_form: form not positive-definite (4g^2 = " << strongest
        << " > w w' = " << ww << ")";
    throw InstabilityError(msg.str());
  }
  const double w2 = f.w * f.w;
  const double wp2 = f.w_prime * f.w_prime;
  const double scale = w2 + wp2 + 8.0 * std::abs(f.g * f.g_prime);
  const double disc = (w2 - wp2) * (w2 - wp2) +
                      16.0 * (f.w * f.g_prime + f.w_prime * f.g) *
                          (f.w * f.g + f.w_prime * f.g_prime);
  if (disc < -detail::kBoundaryTol * scale * scale)
    throw InstabilityError("polariton_closed_form: negative discriminant");
  const double root = std::sqrt(std::max(disc, 0.0));
  const double sum = 8.0 * f.g * f.g_prime + w2 + wp2;
  const double two_plus = sum + root;
  double two_minus = sum - root;
  if (two_minus < 0.0) {
    if (two_minus < -detail::kBoundaryTol * scale) {
      std::ostringstream msg;
      msg << "polariton_closed_form: 2E-^2 = " << two_minus << " < 0";
      throw InstabilityError(msg.str());
    }
    two_minus = 0.0;
  } else if (two_minus <= detail::kBoundaryTol * scale) {
    two_minus = 0.0;
  }
  return detail::make_pair(f, std::sqrt(0.5 * two_plus), std::sqrt(0.5 * two_minus));
}

/// Symplectic route: E = 2 nu for each eigenvalue pair +-i nu of Omega M.
inline PolaritonPair williamson_frequencies(const BilinearForm &f) {
  detail::check_form(f);
  const double scale = std::max(f.w, f.w_prime);
  const Eigen::Matrix4d m = quadrature_matrix(f);

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> sym(m, Eigen::EigenvaluesOnly);
  const double min_eig = sym.eigenvalues().minCoeff();
  const bool boundary = min_eig <= 1e-12 * scale;
  if (min_eig < -1e-12 * scale)
    throw InstabilityError("williamson_frequencies: M is not positive-definite");

  Eigen::EigenSolver<Eigen::Matrix4d> es(symplectic_form() * m, false);
  const Eigen::Vector4cd lambda = es.eigenvalues();
  std::array<double, 4> nu{};
  for (int i = 0; i < 4; ++i) {
    const double re = lambda[i].real();
    const double im = lambda[i].imag();
    if (std::abs(lambda[i]) <= 1e-7 * scale && boundary) {
      nu[i] = 0.0;
      continue;
    }
    if (std::abs(re) > 1e-10 * std::abs(im))
      throw InstabilityError("williamson_frequencies: eigenvalue of Omega M is not "
                             "purely imaginary");
    nu[i] = std::abs(im);
  }
  std::sort(nu.begin(), nu.end(), std::greater<>());
  // nu holds each frequency twice (from +-i nu).
  return detail::make_pair(f, 2.0 * nu[0], 2.0 * nu[2]);
}

} // namespace dicke
