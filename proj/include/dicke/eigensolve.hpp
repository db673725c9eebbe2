#pragma once

// Lowest eigenpairs of a real symmetric operator: dense reference and a
// thick-restart Lanczos iteration with full reorthogonalisation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dicke/errors.hpp"

namespace dicke {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class EigenMethod { Auto, Dense, Iterative };

struct EigenOptions {
  EigenMethod method = EigenMethod::Auto;
  int dense_threshold = 1200; ///< Auto uses the dense solver up to this dimension
  int basis_size = 0;         ///< Krylov basis; 0 picks max(40, 3k + 20)
  double tol = 1e-10;         ///< residual <= tol * max(1, |theta|)
  int max_restarts = 2000;
  std::uint64_t seed = 0x5eed5eedULL;
  bool want_vectors = false;
};

struct EigenResult {
  Eigen::VectorXd values;  ///< ascending
  Eigen::MatrixXd vectors; ///< columns, only when requested
  std::vector<double> residuals;
  int matvecs = 0;
  int restarts = 0;
};

namespace detail {

// Reproducible on every platform: raw 64-bit Mersenne output mapped to (-1, 1).
inline Eigen::VectorXd seeded_vector(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v[i] = 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
  return v / v.norm();
}

} // namespace detail

inline EigenResult dense_lowest(const Eigen::MatrixXd &a, int k, bool want_vectors) {
  const int n = static_cast<int>(a.rows());
  if (k < 1 || k > n)
    throw ValidationError("dense_lowest: k out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      a, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("dense_lowest: eigensolver failed");
  EigenResult r;
  r.values = es.eigenvalues().head(k);
  if (want_vectors)
    r.vectors = es.eigenvectors().leftCols(k);
  r.residuals.assign(k, 0.0);
  return r;
}

/// Thick-restart Lanczos for the k smallest eigenvalues of the symmetric
/// operator y = op(x) of dimension n.
template <class Op>
EigenResult lanczos_lowest(int n, int k, Op &&op, const EigenOptions &opts = {}) {
  if (k < 1 || k > n)
    throw ValidationError("lanczos_lowest: k out of range");
  int m = opts.basis_size > 0 ? opts.basis_size : std::max(40, 3 * k + 20);
  m = std::min(m, n - 1);
  if (m < k + 2)
    throw ValidationError("lanczos_lowest: dimension too small for the iterative solver");

  Eigen::MatrixXd v(n, m + 1);
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd w(n);
  std::uint64_t seed = opts.seed;
  v.col(0) = detail::seeded_vector(n, seed);

  EigenResult r;
  int kept = 0;
  double last_beta = 0.0;
  double worst = 0.0;
  for (int cycle = 0; cycle <= opts.max_restarts; ++cycle) {
    for (int j = kept; j < m; ++j) {
      w = op(v.col(j));
      ++r.matvecs;
      const auto basis = v.leftCols(j + 1);
      Eigen::VectorXd h = basis.transpose() * w;
      w.noalias() -= basis * h;
      const Eigen::VectorXd h2 = basis.transpose() * w;
      w.noalias() -= basis * h2;
      h += h2;
      t.block(0, j, j + 1, 1) = h;
      t.block(j, 0, 1, j + 1) = h.transpose();
      double beta = w.norm();
      const double scale = std::max(1.0, t.diagonal().head(j + 1).cwiseAbs().maxCoeff());
      if (beta <= 1e-13 * scale) {
        // invariant subspace: continue with a fresh direction orthogonal to the basis
        Eigen::VectorXd f = detail::seeded_vector(n, ++seed);
        for (int pass = 0; pass < 2; ++pass)
          f.noalias() -= basis * (basis.transpose() * f);
        v.col(j + 1) = f / f.norm();
        beta = 0.0;
      } else {
        v.col(j + 1) = w / beta;
      }
      if (j + 1 < m) {
        t(j + 1, j) = beta;
        t(j, j + 1) = beta;
      }
      last_beta = beta;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::VectorXd &theta = es.eigenvalues();
    const Eigen::MatrixXd &s = es.eigenvectors();
    bool converged = true;
    worst = 0.0;
    r.residuals.assign(k, 0.0);
    for (int i = 0; i < k; ++i) {
      const double res = std::abs(last_beta * s(m - 1, i));
      r.residuals[i] = res;
      const double rel = res / std::max(1.0, std::abs(theta[i]));
      worst = std::max(worst, rel);
      if (rel > opts.tol)
        converged = false;
    }
    if (converged) {
      r.values = theta.head(k);
      if (opts.want_vectors)
        r.vectors = v.leftCols(m) * s.leftCols(k);
      r.restarts = cycle;
      return r;
    }

    kept = std::min(m - 1, k + (m - k) / 2);
    const Eigen::MatrixXd ritz = v.leftCols(m) * s.leftCols(kept);
    const Eigen::VectorXd residual = v.col(m);
    v.leftCols(kept) = ritz;
    v.col(kept) = residual;
    t.setZero();
    for (int i = 0; i < kept; ++i)
      t(i, i) = theta[i];
  }
  std::ostringstream msg;
  msg << "lanczos_lowest: no convergence after " << opts.max_restarts
      << " restarts; worst relative residual " << worst;
  throw ConvergenceError(msg.str());
}

inline EigenResult lowest_eigenpairs(const SparseMatrix &h, int k, const EigenOptions &opts = {}) {
  const int n = static_cast<int>(h.rows());
  if (k < 1 || k > n)
    throw ValidationError("lowest_eigenpairs: k out of range");
  const int m = opts.basis_size > 0 ? opts.basis_size : std::max(40, 3 * k + 20);
  const bool dense = opts.method == EigenMethod::Dense ||
                     (opts.method == EigenMethod::Auto &&
                      (n <= opts.dense_threshold || n <= m + 1));
  if (dense)
    return dense_lowest(Eigen::MatrixXd(h), k, opts.want_vectors);
  return lanczos_lowest(
      n, k, [&h](const auto &x) -> Eigen::VectorXd { return h * x; }, opts);
}

} // namespace dicke
