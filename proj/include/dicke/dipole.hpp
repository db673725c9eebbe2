#pragma once

// Single double-well dipole on a uniform grid.
//
//   H = (E/2) ( -d^2/dzeta^2 + a zeta^2 + b zeta^4 )
//
// with a = -beta (main-text convention) or a = (omega eta alpha / E)^2 - beta
// (polarisation self-energy absorbed into the bare dipole) and b = 1/2.
// The kinetic operator uses the sinc discrete-variable representation on the
// grid, which converges exponentially in the grid spacing.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <variant>

#include <Eigen/Dense>

#include "dicke/csv.hpp"
#include "dicke/errors.hpp"

namespace dicke {

struct GridSpec {
  double zeta_max = 6.0; ///< grid spans [-zeta_max, zeta_max]
  int points = 256;
};

enum class Convention { MainText, SelfEnergyInBare };

inline const char *to_string(Convention c) {
  return c == Convention::MainText ? "main-text" : "self-energy-in-bare";
}

/// Bare dipole excludes the polarisation self-energy.
struct MainText {};

/// Bare dipole includes the polarisation self-energy of gauge alpha at
/// coupling eta; the single-dipole value (omega eta alpha / E)^2 is added to
/// the quadratic coefficient.
struct SelfEnergyInBare {
  double alpha = 0.0;
  double eta = 0.0;
  double omega = 1.0;
};

using Renormalization = std::variant<MainText, SelfEnergyInBare>;

struct WellShape {
  double beta = 0.0;
  double energy_scale = 1.0;
  Renormalization renorm = MainText{};

  Convention convention() const {
    return std::holds_alternative<MainText>(renorm) ? Convention::MainText
                                                    : Convention::SelfEnergyInBare;
  }

  /// Coefficient added to -beta in front of zeta^2.
  double quadratic_shift() const {
    if (const auto *s = std::get_if<SelfEnergyInBare>(&renorm)) {
      const double r = s->omega * s->eta * s->alpha / energy_scale;
      return r * r;
    }
    return 0.0;
  }
};

/// (E/2)(-d^2 + quadratic zeta^2 + quartic zeta^4).
struct EvenPotential {
  double quadratic = 0.0;
  double quartic = 0.0;
};

struct SolveOptions {
  bool check_convergence = true;
  /// Max relative change of e1 - e0 when the grid is doubled.
  double convergence_tol = 1e-8;
  /// Max ground-state density at the grid edge relative to its peak.
  double edge_tol = 1e-10;
};

/// Lowest levels of one dipole and their matrix elements in the energy basis.
///
/// Eigenstate phases are fixed so that zeta(n, n+1) > 0. Elements between
/// states of equal parity are exactly zero for zeta and momentum, and states
/// of opposite parity have exactly zero zeta_squared.
struct DipoleSpectrum {
  Eigen::VectorXd energies;       ///< absolute energies eps_n = E e_n
  Eigen::MatrixXd zeta;           ///< <m|zeta|n>
  Eigen::MatrixXd zeta_squared;   ///< <m|zeta^2|n> (projected, not squared)
  Eigen::MatrixXd momentum;       ///< P_mn with <m|p|n> = i P_mn = i (e_m - e_n) zeta_mn
  Eigen::VectorXd grid;           ///< grid abscissae
  Eigen::MatrixXd wavefunctions;  ///< columns: normalised eigenvectors on the grid
  double energy_scale = 1.0;
  double quadratic_shift = 0.0;
  Convention convention = Convention::MainText;

  int levels() const { return static_cast<int>(energies.size()); }
  double dimensionless(int n) const { return energies[n] / energy_scale; }
  /// omega_m = eps_1 - eps_0.
  double transition_frequency() const { return energies[1] - energies[0]; }
  /// zeta_01 (> 0 by the phase convention).
  double dipole_element() const { return zeta(0, 1); }

  /// Copy restricted to the lowest `n` levels.
  DipoleSpectrum truncated(int n) const {
    if (n < 1 || n > levels())
      throw ValidationError("DipoleSpectrum::truncated: level count out of range");
    DipoleSpectrum out = *this;
    out.energies = energies.head(n);
    out.zeta = zeta.topLeftCorner(n, n);
    out.zeta_squared = zeta_squared.topLeftCorner(n, n);
    out.momentum = momentum.topLeftCorner(n, n);
    out.wavefunctions = wavefunctions.leftCols(n);
    return out;
  }
};

namespace detail {

inline Eigen::VectorXd make_grid(const GridSpec &grid) {
  return Eigen::VectorXd::LinSpaced(grid.points, -grid.zeta_max, grid.zeta_max);
}

/// Dense matrix of -d^2/dzeta^2 + V in the sinc DVR.
inline Eigen::MatrixXd dvr_hamiltonian(const EvenPotential &pot, const GridSpec &grid) {
  const int n = grid.points;
  const Eigen::VectorXd x = make_grid(grid);
  const double h = x[1] - x[0];
  const double pi2 = std::numbers::pi * std::numbers::pi;
  Eigen::MatrixXd m(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (j == k) {
        const double z2 = x[j] * x[j];
        m(j, k) = pi2 / (3.0 * h * h) + pot.quadratic * z2 + pot.quartic * z2 * z2;
      } else {
        const int d = j - k;
        const double sign = (d % 2 == 0) ? 1.0 : -1.0;
        m(j, k) = 2.0 * sign / (double(d) * double(d) * h * h);
      }
    }
  }
  return m;
}

inline void check_grid(const GridSpec &grid, int levels) {
  if (grid.points < 3 || !(grid.zeta_max > 0.0))
    throw ValidationError("GridSpec: need points >= 3 and zeta_max > 0");
  if (levels < 1 || levels > grid.points / 4) {
    std::ostringstream msg;
    msg << "dipole solve: levels=" << levels << " exceeds points/4 = " << grid.points / 4;
    throw ValidationError(msg.str());
  }
}

inline double splitting(const Eigen::VectorXd &eig) {
  // eigenvalues of -d^2 + V are twice the dimensionless energies
  return 0.5 * (eig[1] - eig[0]);
}

} // namespace detail

/// Solve (E/2)(-d^2 + a zeta^2 + b zeta^4) for its lowest `levels` states.
inline DipoleSpectrum solve_even_potential(const EvenPotential &pot, double energy_scale,
                                           const GridSpec &grid, int levels,
                                           const SolveOptions &opts = {}) {
  detail::check_grid(grid, levels);
  if (!(energy_scale > 0.0) || !std::isfinite(energy_scale))
    throw ValidationError("dipole solve: energy_scale must be positive");
  if (!std::isfinite(pot.quadratic) || !std::isfinite(pot.quartic))
    throw ValidationError("dipole solve: non-finite potential coefficient");

  const Eigen::VectorXd x = detail::make_grid(grid);
  const int n = grid.points;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(detail::dvr_hamiltonian(pot, grid));
  if (es.info() != Eigen::Success)
    throw ConvergenceError("dipole solve: dense eigensolver failed");
  const Eigen::VectorXd &eig = es.eigenvalues();

  for (int i = 1; i < std::min(levels + 1, n); ++i)
    if (!(eig[i] > eig[i - 1]))
      throw DomainError("dipole solve: degenerate levels, parity assignment impossible");

  {
    const Eigen::VectorXd rho = es.eigenvectors().col(0).array().square();
    const double edge = std::max(rho[0], rho[n - 1]);
    if (edge > opts.edge_tol * rho.maxCoeff())
      throw DomainError("dipole solve: ground state not contained in the grid; "
                        "increase zeta_max");
  }

  if (opts.check_convergence && levels >= 2) {
    GridSpec fine = grid;
    fine.points = 2 * grid.points;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(detail::dvr_hamiltonian(pot, fine),
                                                       Eigen::EigenvaluesOnly);
    const double coarse = detail::splitting(eig);
    const double refined = detail::splitting(ref.eigenvalues());
    const double rel = std::abs(refined - coarse) / std::abs(coarse);
    if (rel > opts.convergence_tol) {
      std::ostringstream msg;
      msg << "dipole solve: e1-e0 changed by " << rel << " (relative) under grid doubling";
      throw ConvergenceError(msg.str());
    }
  }

  DipoleSpectrum out;
  out.energy_scale = energy_scale;
  out.grid = x;
  out.energies = 0.5 * energy_scale * eig.head(levels);
  out.wavefunctions = es.eigenvectors().leftCols(levels);

  // exact parity (-1)^n, then unit norm
  for (int k = 0; k < levels; ++k) {
    const double s = (k % 2 == 0) ? 1.0 : -1.0;
    Eigen::VectorXd v = out.wavefunctions.col(k);
    Eigen::VectorXd sym = 0.5 * (v + s * v.reverse());
    out.wavefunctions.col(k) = sym / sym.norm();
  }

  for (int k = 1; k < levels; ++k) {
    const double z = out.wavefunctions.col(k - 1).dot(x.cwiseProduct(out.wavefunctions.col(k)));
    if (z < 0.0)
      out.wavefunctions.col(k) *= -1.0;
  }

  const Eigen::VectorXd x2 = x.array().square();
  out.zeta = out.wavefunctions.transpose() * x.asDiagonal() * out.wavefunctions;
  out.zeta_squared = out.wavefunctions.transpose() * x2.asDiagonal() * out.wavefunctions;
  out.momentum.resize(levels, levels);
  for (int m = 0; m < levels; ++m) {
    for (int k = 0; k < levels; ++k) {
      if ((m + k) % 2 == 0) {
        out.zeta(m, k) = 0.0;
      } else {
        out.zeta_squared(m, k) = 0.0;
      }
    }
  }
  out.zeta = 0.5 * (out.zeta + out.zeta.transpose()).eval();
  out.zeta_squared = 0.5 * (out.zeta_squared + out.zeta_squared.transpose()).eval();
  for (int m = 0; m < levels; ++m)
    for (int k = 0; k < levels; ++k)
      out.momentum(m, k) =
          (out.dimensionless(m) - out.dimensionless(k)) * out.zeta(m, k);
  return out;
}

/// Double-well spectrum in the requested truncation convention.
inline DipoleSpectrum solve_double_well(const WellShape &shape, const GridSpec &grid,
                                        int levels, const SolveOptions &opts = {}) {
  const double shift = shape.quadratic_shift();
  if (!std::isfinite(shift))
    throw ValidationError("solve_double_well: non-finite self-energy shift");
  DipoleSpectrum s = solve_even_potential({shift - shape.beta, 0.5}, shape.energy_scale,
                                          grid, levels, opts);
  s.convention = shape.convention();
  s.quadratic_shift = shift;
  return s;
}

/// f-sum S = sum_{n>0} 2 (e_n - e_0) zeta_0n^2 with e_n = eps_n / E.
/// Equals 1 for the complete spectrum; partial sums increase towards it.
inline double trk_sum(const DipoleSpectrum &s) {
  double sum = 0.0;
  for (int n = 1; n < s.levels(); ++n)
    sum += 2.0 * (s.dimensionless(n) - s.dimensionless(0)) * s.zeta(0, n) * s.zeta(0, n);
  return sum;
}

/// Energy scale E that puts the bare transition eps_1 - eps_0 at omega.
inline double resonance_energy_scale(double beta, double omega, const GridSpec &grid = {},
                                     const SolveOptions &opts = {}) {
  if (!(omega > 0.0))
    throw ValidationError("resonance_energy_scale: omega must be positive");
  const DipoleSpectrum s = solve_double_well({beta, 1.0, MainText{}}, grid, 2, opts);
  return omega / (s.dimensionless(1) - s.dimensionless(0));
}

/// Audit table: n, e_n (dimensionless), eps_n (absolute), zeta_0n, zeta_1n.
inline void write_spectrum_csv(std::ostream &out, const DipoleSpectrum &s) {
  csv::Writer w(out);
  w.header({"n", "e_n", "eps_n", "zeta_0n", "zeta_1n"});
  for (int n = 0; n < s.levels(); ++n) {
    w.row({csv::number(n), csv::number(s.dimensionless(n)), csv::number(s.energies[n]),
           csv::number(s.zeta(0, n)),
           csv::number(s.levels() > 1 ? s.zeta(1, n) : 0.0)});
  }
}

} // namespace dicke
