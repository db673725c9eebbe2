#pragma once

// Finite-N Hamiltonian of N double-well dipoles and one cavity mode,
// expanded in (dipole eigenbasis)^N x (Fock states).
//
// After the rotation a -> i a every term is real. With K = a' - a, X = a + a',
// lambda = eta sqrt(omega / (2 N E)) and c = eta^2 omega^2 / (2 N E):
//
//   H = omega (a'a + 1/2) + sum_mu eps_n(mu)
//     + (E/2) N (1-alpha)^2 lambda^2 (-K^2)
//     + E (1-alpha) lambda sum_mu P_mu K
//     - alpha eta omega^{3/2} / sqrt(2 N E) sum_mu zeta_mu X
//     + alpha^2 c sum_mu zeta_mu^2                       (main-text dipole only)
//     - (1-alpha^2) c sum_{mu != nu} zeta_mu zeta_nu
//
// where <m|p|n> = i P_mn in the dipole eigenbasis.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/MatrixFunctions>

#include "dicke/csv.hpp"
#include "dicke/dipole.hpp"
#include "dicke/eigensolve.hpp"
#include "dicke/errors.hpp"
#include "dicke/gauge.hpp"

namespace dicke {

enum class Representation { ProductBasis, CollectiveSpin };

/// How the truncated zeta^2 entering the self-energy is formed.
enum class SquareConvention {
  Projected,        ///< <m|zeta^2|n> of the full operator
  SquareOfTruncated ///< (P zeta P)^2
};

struct HilbertConfig {
  int n_dipoles = 1;
  int dipole_levels = 8;
  int fock_cutoff = 40;
  Representation representation = Representation::ProductBasis;
  std::int64_t budget = 2'000'000;
  SquareConvention zeta_squared = SquareConvention::Projected;

  std::int64_t dimension() const {
    if (representation == Representation::CollectiveSpin)
      return std::int64_t(n_dipoles + 1) * fock_cutoff;
    std::int64_t d = fock_cutoff;
    for (int i = 0; i < n_dipoles; ++i)
      d *= dipole_levels;
    return d;
  }

  void validate() const {
    if (n_dipoles < 1 || dipole_levels < 2 || fock_cutoff < 2)
      throw ValidationError("HilbertConfig: need N >= 1, L >= 2, M >= 2");
    if (representation == Representation::CollectiveSpin && dipole_levels != 2)
      throw ValidationError("HilbertConfig: collective-spin basis requires L = 2");
    if (n_dipoles > 6 && representation == Representation::ProductBasis)
      throw BudgetError("HilbertConfig: product basis supports N <= 6");
    if (dimension() > budget) {
      std::ostringstream msg;
      msg << "HilbertConfig: dimension " << dimension() << " exceeds budget " << budget;
      throw BudgetError(msg.str());
    }
  }
};

struct AssembledHamiltonian {
  SparseMatrix matrix;
  int dimension = 0;
  Representation representation = Representation::ProductBasis;
  int n_dipoles = 0;
  int levels = 0; ///< L, or 2 for the collective basis
  int fock = 0;
  std::vector<int> material; ///< product: packed dipole levels; collective: j + m
  std::vector<int> photon;
  std::vector<int> parity;   ///< joint parity (sum of dipole levels + photons) mod 2

  /// Human-readable label of basis state i.
  std::string label(int i) const {
    std::ostringstream os;
    if (representation == Representation::CollectiveSpin) {
      os << "|j+m=" << material[i] << ",k=" << photon[i] << ">";
      return os.str();
    }
    os << '|';
    int s = material[i];
    std::vector<int> digits(n_dipoles);
    for (int mu = n_dipoles - 1; mu >= 0; --mu) {
      digits[mu] = s % levels;
      s /= levels;
    }
    for (int d : digits)
      os << d;
    os << ",k=" << photon[i] << '>';
    return os.str();
  }
};

namespace detail {

// <r|K|c> and <r|X|c> for K = a' - a, X = a' + a
inline double k_element(int r, int c) {
  if (r == c + 1)
    return std::sqrt(double(r));
  if (c == r + 1)
    return -std::sqrt(double(c));
  return 0.0;
}
inline double x_element(int r, int c) {
  if (r == c + 1)
    return std::sqrt(double(r));
  if (c == r + 1)
    return std::sqrt(double(c));
  return 0.0;
}

// Truncated square (K K) with K the M x M truncation.
inline Eigen::MatrixXd minus_k_squared(int m) {
  Eigen::MatrixXd k(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c)
      k(r, c) = k_element(r, c);
  return -(k * k);
}

inline void check_convention(const DipoleSpectrum &s, Convention convention,
                             const ReducedParams &p) {
  if (s.convention != convention) {
    std::ostringstream msg;
    msg << "spectrum convention " << to_string(s.convention) << " != requested "
        << to_string(convention);
    throw ConventionMismatch(msg.str());
  }
  if (convention == Convention::SelfEnergyInBare) {
    const double r = p.omega * p.eta * p.alpha / p.energy_scale;
    const double expected = r * r / p.n_dipoles;
    if (std::abs(s.quadratic_shift - expected) > 1e-12 * std::max(1.0, expected))
      throw ConventionMismatch("spectrum self-energy shift does not match (eta, alpha, N)");
  }
}

inline AssembledHamiltonian finish(AssembledHamiltonian h,
                                   std::vector<Eigen::Triplet<double>> &triplets) {
  h.matrix.resize(h.dimension, h.dimension);
  h.matrix.setFromTriplets(triplets.begin(), triplets.end());
  h.matrix.makeCompressed();
  return h;
}

} // namespace detail

/// Bare dipole spectrum appropriate for `convention` at this (eta, alpha, N).
/// The self-energy of one of N dipoles carries eta / sqrt(N).
inline DipoleSpectrum convention_spectrum(const ReducedParams &p, Convention convention, int levels,
                                          const GridSpec &grid = {}) {
  if (convention == Convention::MainText)
    return solve_double_well({p.beta, p.energy_scale, MainText{}}, grid, levels);
  const double eta_eff = p.eta / std::sqrt(double(p.n_dipoles));
  return solve_double_well({p.beta, p.energy_scale, SelfEnergyInBare{p.alpha, eta_eff, p.omega}},
                           grid, levels);
}

/// Product-basis Hamiltonian; `params.spectrum` supplies the dipole levels.
inline AssembledHamiltonian assemble(const HilbertConfig &config, const ReducedParams &params,
                                     Convention convention = Convention::MainText) {
  config.validate();
  if (config.representation != Representation::ProductBasis)
    throw ValidationError("assemble: use dicke_two_level for the collective basis");
  params.validate();
  const int n = config.n_dipoles;
  const int l = config.dipole_levels;
  const int m = config.fock_cutoff;
  if (params.n_dipoles != n)
    throw ValidationError("assemble: params.n_dipoles differs from config");
  if (params.spectrum.levels() < l)
    throw ValidationError("assemble: spectrum has fewer levels than dipole_levels");
  detail::check_convention(params.spectrum, convention, params);

  const DipoleSpectrum s = params.spectrum.truncated(l);
  const Eigen::MatrixXd &z = s.zeta;
  const Eigen::MatrixXd z2 =
      config.zeta_squared == SquareConvention::Projected ? s.zeta_squared : Eigen::MatrixXd(z * z);

  const double w = params.omega;
  const double e = params.energy_scale;
  const double a = params.alpha;
  const double lambda = params.eta * std::sqrt(w / (2.0 * n * e));
  const double c = params.eta * params.eta * w * w / (2.0 * n * e);
  const double c_a2 = 0.5 * e * n * (1.0 - a) * (1.0 - a) * lambda * lambda;
  const double c_p = e * (1.0 - a) * lambda;
  const double c_x = -a * params.eta * std::pow(w, 1.5) / std::sqrt(2.0 * n * e);
  const double c_self = convention == Convention::MainText ? a * a * c : 0.0;
  const double c_dd = -(1.0 - a * a) * c;
  const Eigen::MatrixXd a2 = detail::minus_k_squared(m);

  int n_material = 1;
  for (int i = 0; i < n; ++i)
    n_material *= l;
  std::vector<int> stride(n);
  for (int mu = n - 1, st = 1; mu >= 0; --mu, st *= l)
    stride[mu] = st;

  AssembledHamiltonian h;
  h.dimension = n_material * m;
  h.representation = Representation::ProductBasis;
  h.n_dipoles = n;
  h.levels = l;
  h.fock = m;
  h.material.resize(h.dimension);
  h.photon.resize(h.dimension);
  h.parity.resize(h.dimension);

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(h.dimension) * std::size_t(4 + 4 * n * l + n * n * l * l / 2));
  std::vector<int> digit(n);
  for (int sm = 0; sm < n_material; ++sm) {
    int rest = sm, level_sum = 0;
    for (int mu = 0; mu < n; ++mu) {
      digit[mu] = rest / stride[mu];
      rest %= stride[mu];
      level_sum += digit[mu];
    }
    double diag = 0.0;
    for (int mu = 0; mu < n; ++mu)
      diag += s.energies[digit[mu]] + c_self * z2(digit[mu], digit[mu]);

    for (int k = 0; k < m; ++k) {
      const int row = sm * m + k;
      h.material[row] = sm;
      h.photon[row] = k;
      h.parity[row] = (level_sum + k) % 2;
      trip.emplace_back(row, row, diag + w * (k + 0.5) + c_a2 * a2(k, k));
      for (int kk : {k - 2, k + 2})
        if (kk >= 0 && kk < m && c_a2 != 0.0)
          trip.emplace_back(row, sm * m + kk, c_a2 * a2(k, kk));
    }

    for (int mu = 0; mu < n; ++mu) {
      const int nmu = digit[mu];
      for (int to = 0; to < l; ++to) {
        if (to == nmu)
          continue;
        const int sc = sm + (to - nmu) * stride[mu];
        if ((to + nmu) % 2 == 1) {
          const double p_el = s.momentum(nmu, to);
          const double z_el = z(nmu, to);
          for (int k = 0; k < m; ++k) {
            for (int kk : {k - 1, k + 1}) {
              if (kk < 0 || kk >= m)
                continue;
              const double v = c_p * p_el * detail::k_element(k, kk) +
                               c_x * z_el * detail::x_element(k, kk);
              if (v != 0.0)
                trip.emplace_back(sm * m + k, sc * m + kk, v);
            }
          }
        } else if (c_self != 0.0 && z2(nmu, to) != 0.0) {
          for (int k = 0; k < m; ++k)
            trip.emplace_back(sm * m + k, sc * m + k, c_self * z2(nmu, to));
        }
      }
    }

    if (c_dd != 0.0) {
      for (int mu = 0; mu < n; ++mu) {
        for (int nu = mu + 1; nu < n; ++nu) {
          for (int tm = 0; tm < l; ++tm) {
            if ((tm + digit[mu]) % 2 == 0)
              continue;
            for (int tn = 0; tn < l; ++tn) {
              if ((tn + digit[nu]) % 2 == 0)
                continue;
              const double v = 2.0 * c_dd * z(digit[mu], tm) * z(digit[nu], tn);
              const int sc = sm + (tm - digit[mu]) * stride[mu] + (tn - digit[nu]) * stride[nu];
              for (int k = 0; k < m; ++k)
                trip.emplace_back(sm * m + k, sc * m + k, v);
            }
          }
        }
      }
    }
  }
  return detail::finish(std::move(h), trip);
}

/// Two-level collective (Dicke) Hamiltonian on |j, m> x Fock with j = N/2,
/// after the rotation c -> i c:
///   omega_m J_z + N (eps0 + eps1)/2 + rho d^2/2 + omega_alpha (c'c + 1/2)
///   - (C_alpha / N)(J+ + J-)^2 - g'/sqrt(N) (J+ - J-) K + g/sqrt(N) (J+ + J-) X
inline AssembledHamiltonian dicke_two_level(const HilbertConfig &config, const ReducedParams &params) {
  HilbertConfig cfg = config;
  cfg.representation = Representation::CollectiveSpin;
  cfg.dipole_levels = 2;
  cfg.validate();
  if (params.n_dipoles != cfg.n_dipoles)
    throw ValidationError("dicke_two_level: params.n_dipoles differs from config");
  const CouplingSet c = derive_couplings(params);
  const int n = cfg.n_dipoles;
  const int m = cfg.fock_cutoff;
  const double j = 0.5 * n;
  const double sqn = std::sqrt(double(n));
  const double eps0 = params.spectrum.energies[0];
  const double eps1 = params.spectrum.energies[1];
  const double constant = 0.5 * n * (eps0 + eps1) + 0.5 * c.rho_d2;

  // (J+ + J-) and (J+ - J-) in the |j, m> basis, index i = j + m
  Eigen::MatrixXd jx = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Eigen::MatrixXd ja = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i < n; ++i) {
    const double mz = i - j;
    const double up = std::sqrt(j * (j + 1.0) - mz * (mz + 1.0)); // <i+1|J+|i>
    jx(i + 1, i) = jx(i, i + 1) = up;
    ja(i + 1, i) = up;
    ja(i, i + 1) = -up;
  }
  const Eigen::MatrixXd jx2 = jx * jx;

  AssembledHamiltonian h;
  h.dimension = (n + 1) * m;
  h.representation = Representation::CollectiveSpin;
  h.n_dipoles = n;
  h.levels = 2;
  h.fock = m;
  h.material.resize(h.dimension);
  h.photon.resize(h.dimension);
  h.parity.resize(h.dimension);

  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i <= n; ++i) {
    for (int k = 0; k < m; ++k) {
      const int row = i * m + k;
      h.material[row] = i;
      h.photon[row] = k;
      h.parity[row] = (i + k) % 2;
      trip.emplace_back(row, row,
                        c.omega_m * (i - j) + constant + c.omega_alpha * (k + 0.5) -
                            (c.c_alpha / n) * jx2(i, i));
    }
    for (int i2 = 0; i2 <= n; ++i2) {
      if (i2 != i && jx2(i, i2) != 0.0 && c.c_alpha != 0.0)
        for (int k = 0; k < m; ++k)
          trip.emplace_back(i * m + k, i2 * m + k, -(c.c_alpha / n) * jx2(i, i2));
      if (std::abs(i2 - i) != 1)
        continue;
      for (int k = 0; k < m; ++k) {
        for (int kk : {k - 1, k + 1}) {
          if (kk < 0 || kk >= m)
            continue;
          const double v = -c.g_prime_alpha / sqn * ja(i, i2) * detail::k_element(k, kk) +
                           c.g_alpha / sqn * jx(i, i2) * detail::x_element(k, kk);
          if (v != 0.0)
            trip.emplace_back(i * m + k, i2 * m + kk, v);
        }
      }
    }
  }
  return detail::finish(std::move(h), trip);
}

/// Block of h acting on the joint-parity sector `parity` (0 even, 1 odd),
/// with the global indices of its basis states.
inline SparseMatrix parity_block(const AssembledHamiltonian &h, int parity,
                                 std::vector<int> *indices = nullptr) {
  std::vector<int> local(h.dimension, -1);
  std::vector<int> global;
  for (int i = 0; i < h.dimension; ++i)
    if (h.parity[i] == parity) {
      local[i] = static_cast<int>(global.size());
      global.push_back(i);
    }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(h.matrix.nonZeros() / 2 + 1);
  for (int r : global) {
    for (SparseMatrix::InnerIterator it(h.matrix, r); it; ++it) {
      const int col = static_cast<int>(it.col());
      if (local[col] < 0) {
        if (it.value() != 0.0)
          throw ValidationError("parity_block: Hamiltonian mixes parity sectors");
        continue;
      }
      trip.emplace_back(local[r], local[col], it.value());
    }
  }
  SparseMatrix out(static_cast<int>(global.size()), static_cast<int>(global.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  if (indices)
    *indices = std::move(global);
  return out;
}

struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors; ///< full-space columns, when requested
  std::vector<int> parity;
  std::vector<std::string> warnings;
};

/// k lowest eigenvalues (ascending) of h, solved sector by sector.
inline Spectrum lowest_eigenvalues(const AssembledHamiltonian &h, int k, EigenOptions opts = {}) {
  if (k < 1 || k > h.dimension)
    throw ValidationError("lowest_eigenvalues: k out of range");
  struct Level {
    double value;
    int parity;
    Eigen::VectorXd vec;
  };
  std::vector<Level> levels;
  for (int p = 0; p < 2; ++p) {
    std::vector<int> idx;
    const SparseMatrix block = parity_block(h, p, &idx);
    const int dim = static_cast<int>(block.rows());
    if (dim == 0)
      continue;
    const int kk = std::min(k, dim);
    const EigenResult r = lowest_eigenpairs(block, kk, opts);
    for (int i = 0; i < kk; ++i) {
      Level lv{r.values[i], p, {}};
      if (opts.want_vectors) {
        lv.vec = Eigen::VectorXd::Zero(h.dimension);
        for (int q = 0; q < dim; ++q)
          lv.vec[idx[q]] = r.vectors(q, i);
      }
      levels.push_back(std::move(lv));
    }
  }
  std::stable_sort(levels.begin(), levels.end(),
                   [](const Level &x, const Level &y) { return x.value < y.value; });
  Spectrum out;
  out.values.resize(k);
  if (opts.want_vectors)
    out.vectors.resize(h.dimension, k);
  for (int i = 0; i < k; ++i) {
    out.values[i] = levels[i].value;
    out.parity.push_back(levels[i].parity);
    if (opts.want_vectors)
      out.vectors.col(i) = levels[i].vec;
  }
  return out;
}

/// Ground-state weight on the two highest Fock states.
inline double fock_tail_weight(const AssembledHamiltonian &h, const Eigen::VectorXd &state) {
  double tail = 0.0;
  for (int i = 0; i < h.dimension; ++i)
    if (h.photon[i] >= h.fock - 2)
      tail += state[i] * state[i];
  return tail;
}

inline constexpr double kFockTailTol = 1e-8;

/// Ground and first excited energies with a Fock-cutoff adequacy warning.
inline Spectrum low_levels_checked(const AssembledHamiltonian &h, int k = 2,
                                   EigenOptions opts = {}) {
  opts.want_vectors = true;
  Spectrum s = lowest_eigenvalues(h, std::min(k, h.dimension), opts);
  const double tail = fock_tail_weight(h, s.vectors.col(0));
  if (tail > kFockTailTol) {
    std::ostringstream msg;
    msg << "Fock cutoff M=" << h.fock << ": ground-state tail weight " << tail << " > "
        << kFockTailTol;
    s.warnings.push_back(msg.str());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Sweeps

struct TransitionRow {
  double eta = 0.0;
  double alpha = 0.0;
  double ground = 0.0;       ///< G, truncation L
  double excited = 0.0;      ///< E
  double gap = 0.0;          ///< (E - G) / omega
  double ground_two_level = 0.0;
  double excited_two_level = 0.0;
  double gap_two_level = 0.0;
  std::vector<std::string> warnings;
};

/// Parameter point for one sweep value; re-solves the dipole when the bare
/// spectrum depends on (eta, alpha).
inline ReducedParams sweep_point(const ReducedParams &tmpl, double eta, Convention convention,
                                 int levels) {
  ReducedParams p = tmpl.with_eta(eta);
  if (convention == Convention::SelfEnergyInBare || p.spectrum.levels() < levels)
    p.spectrum = convention_spectrum(p, convention, std::max(levels, 2));
  return p;
}

inline TransitionRow transition_point(const HilbertConfig &config, const ReducedParams &tmpl,
                                      double eta, Convention convention = Convention::MainText,
                                      const EigenOptions &opts = {}) {
  const ReducedParams p = sweep_point(tmpl, eta, convention, config.dipole_levels);
  TransitionRow row;
  row.eta = eta;
  row.alpha = p.alpha;
  const Spectrum ex = low_levels_checked(assemble(config, p, convention), 2, opts);
  row.ground = ex.values[0];
  row.excited = ex.values[1];
  row.gap = (row.excited - row.ground) / p.omega;
  row.warnings = ex.warnings;

  HilbertConfig two = config;
  two.representation = Representation::CollectiveSpin;
  two.dipole_levels = 2;
  const Spectrum tl = low_levels_checked(dicke_two_level(two, p), 2, opts);
  row.ground_two_level = tl.values[0];
  row.excited_two_level = tl.values[1];
  row.gap_two_level = (row.excited_two_level - row.ground_two_level) / p.omega;
  for (const auto &w : tl.warnings)
    row.warnings.push_back("two-level: " + w);
  return row;
}

inline std::vector<TransitionRow> transition_sweep(const HilbertConfig &config,
                                                   const ReducedParams &tmpl,
                                                   const std::vector<double> &eta_grid,
                                                   Convention convention = Convention::MainText,
                                                   const EigenOptions &opts = {}) {
  for (std::size_t i = 1; i < eta_grid.size(); ++i)
    if (!(eta_grid[i] > eta_grid[i - 1]))
      throw GridError("transition_sweep: eta grid must be strictly increasing");
  std::vector<TransitionRow> rows;
  for (double eta : eta_grid)
    rows.push_back(transition_point(config, tmpl, eta, convention, opts));
  return rows;
}

/// Ground energy of the configured representation at one coupling.
inline double ground_energy(const HilbertConfig &config, const ReducedParams &p,
                            Convention convention = Convention::MainText,
                            const EigenOptions &opts = {}) {
  if (config.representation == Representation::CollectiveSpin)
    return lowest_eigenvalues(dicke_two_level(config, p), 1, opts).values[0];
  return lowest_eigenvalues(assemble(config, p, convention), 1, opts).values[0];
}

inline void check_uniform(const std::vector<double> &grid, const char *who) {
  if (grid.size() < 3)
    throw GridError(std::string(who) + ": need at least three grid points");
  const double h = grid[1] - grid[0];
  if (!(h > 0.0))
    throw GridError(std::string(who) + ": grid must be increasing");
  for (std::size_t i = 2; i < grid.size(); ++i)
    if (std::abs((grid[i] - grid[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw GridError(std::string(who) + ": grid is not uniform");
}

struct CurvatureRow {
  double eta = 0.0;
  double value = 0.0; ///< (1/(N omega)) d^2 G_s / d eta^2
};

/// Central second differences of G_s = G - rho d^2/2 on a uniform grid,
/// returned for interior points.
inline std::vector<CurvatureRow> curvature_from_ground(const std::vector<double> &eta_grid,
                                                       const std::vector<double> &g_s,
                                                       int n_dipoles, double omega) {
  check_uniform(eta_grid, "second_derivative_sweep");
  const double h = eta_grid[1] - eta_grid[0];
  std::vector<CurvatureRow> out;
  for (std::size_t i = 1; i + 1 < eta_grid.size(); ++i)
    out.push_back({eta_grid[i],
                   (g_s[i + 1] - 2.0 * g_s[i] + g_s[i - 1]) / (h * h) / (n_dipoles * omega)});
  return out;
}

inline std::vector<CurvatureRow> second_derivative_sweep(const HilbertConfig &config,
                                                         const ReducedParams &tmpl,
                                                         const std::vector<double> &eta_grid,
                                                         Convention convention = Convention::MainText,
                                                         const EigenOptions &opts = {}) {
  check_uniform(eta_grid, "second_derivative_sweep");
  std::vector<double> g_s;
  for (double eta : eta_grid) {
    const ReducedParams p = sweep_point(tmpl, eta, convention, config.dipole_levels);
    g_s.push_back(ground_energy(config, p, convention, opts) - 0.5 * p.rho_d2());
  }
  return curvature_from_ground(eta_grid, g_s, config.n_dipoles, tmpl.omega);
}

/// Linear crossings of two sampled curves on a shared abscissa.
inline std::vector<double> crossings(const std::vector<CurvatureRow> &a,
                                     const std::vector<CurvatureRow> &b) {
  std::vector<double> out;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d0 = a[i].value - b[i].value;
    const double d1 = a[i + 1].value - b[i + 1].value;
    if (d0 == 0.0)
      out.push_back(a[i].eta);
    else if ((d0 < 0.0) != (d1 < 0.0) && d1 != 0.0)
      out.push_back(a[i].eta - d0 * (a[i + 1].eta - a[i].eta) / (d1 - d0));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gauge-fixing transformation and convergence diagnostics

inline constexpr std::int64_t kDenseUnitaryBudget = 4000;

/// Orthogonal R = exp[(alpha_to - alpha_from) lambda sum_mu zeta_mu K] on the
/// truncated product space (the rotated form of exp[i (alpha - alpha') d.A]),
/// so that R H(alpha_from) R^T approximates H(alpha_to) at large cutoffs.
inline Eigen::MatrixXd gauge_fixing_unitary(const HilbertConfig &config, const ReducedParams &params,
                                            double alpha_from, double alpha_to) {
  config.validate();
  if (config.representation != Representation::ProductBasis)
    throw ValidationError("gauge_fixing_unitary: product basis required");
  if (config.dimension() > kDenseUnitaryBudget)
    throw BudgetError("gauge_fixing_unitary: dense exponential limited to dimension 4000");
  const int n = config.n_dipoles;
  const int l = config.dipole_levels;
  const int m = config.fock_cutoff;
  const Eigen::MatrixXd z = params.spectrum.truncated(l).zeta;
  const double lambda = params.eta * std::sqrt(params.omega / (2.0 * n * params.energy_scale));

  Eigen::MatrixXd k(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c)
      k(r, c) = detail::k_element(r, c);

  const int dim = static_cast<int>(config.dimension());
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(dim, dim);
  int n_material = dim / m;
  std::vector<int> stride(n);
  for (int mu = n - 1, st = 1; mu >= 0; --mu, st *= l)
    stride[mu] = st;
  for (int sm = 0; sm < n_material; ++sm) {
    for (int mu = 0; mu < n; ++mu) {
      const int nmu = (sm / stride[mu]) % l;
      for (int to = 0; to < l; ++to) {
        if ((to + nmu) % 2 == 0)
          continue;
        const int sc = sm + (to - nmu) * stride[mu];
        gen.block(sm * m, sc * m, m, m) += z(nmu, to) * k;
      }
    }
  }
  gen *= (alpha_to - alpha_from) * lambda;
  return gen.exp();
}

struct ConvergenceRow {
  int levels = 0;
  int fock = 0;
  std::int64_t dimension = 0;
  double ground = 0.0;
  double excited = 0.0;
  std::optional<double> delta_ground;
  std::optional<double> delta_excited;
  bool cauchy = true; ///< |delta| not larger than the previous rung's
};

/// Ground and first excited energies along a ladder of (L, M) cutoffs.
inline std::vector<ConvergenceRow>
convergence_report(const std::vector<std::pair<int, int>> &ladder, const HilbertConfig &base,
                   const ReducedParams &params, Convention convention = Convention::MainText,
                   const EigenOptions &opts = {}) {
  std::vector<ConvergenceRow> rows;
  int max_l = 2;
  for (const auto &[l, m] : ladder)
    max_l = std::max(max_l, l);
  const ReducedParams p = sweep_point(params, params.eta, convention, max_l);
  for (const auto &[l, m] : ladder) {
    HilbertConfig cfg = base;
    cfg.dipole_levels = l;
    cfg.fock_cutoff = m;
    const Spectrum s = lowest_eigenvalues(assemble(cfg, p, convention), 2, opts);
    ConvergenceRow r;
    r.levels = l;
    r.fock = m;
    r.dimension = cfg.dimension();
    r.ground = s.values[0];
    r.excited = s.values[1];
    if (!rows.empty()) {
      const ConvergenceRow &prev = rows.back();
      r.delta_ground = r.ground - prev.ground;
      r.delta_excited = r.excited - prev.excited;
      if (prev.delta_ground && std::abs(*r.delta_ground) > std::abs(*prev.delta_ground))
        r.cauchy = false;
    }
    rows.push_back(r);
  }
  return rows;
}

/// Sparse triplet dump: a "# dimension nnz" line then "row col value" per entry.
inline void write_triplets(std::ostream &out, const AssembledHamiltonian &h) {
  out << "# " << h.dimension << ' ' << h.matrix.nonZeros() << '\n';
  for (int r = 0; r < h.matrix.outerSize(); ++r)
    for (SparseMatrix::InnerIterator it(h.matrix, r); it; ++it)
      out << r << ' ' << it.col() << ' ' << csv::number(it.value()) << '\n';
}

} // namespace dicke
