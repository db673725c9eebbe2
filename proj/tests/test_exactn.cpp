#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "dicke/exactn.hpp"

using namespace dicke;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ReducedParams point(double beta, double eta, double alpha, int n, int levels) {
  return resonant_params(beta, eta, alpha, n, levels);
}

double ground(const HilbertConfig &cfg, const ReducedParams &p) { return ground_energy(cfg, p); }

// Quantum Rabi model written out directly on 2 x M:
// (e0 + e1)/2 + omega_m/2 sz + omega (k + 1/2) + g sx X
double rabi_ground(double e0, double e1, double omega, double g, int m) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (int s = 0; s < 2; ++s)
    for (int k = 0; k < m; ++k) {
      h(s * m + k, s * m + k) = (s == 0 ? e0 : e1) + omega * (k + 0.5);
      if (k + 1 < m) {
        const double x = g * std::sqrt(k + 1.0);
        h((1 - s) * m + k + 1, s * m + k) = x;
        h(s * m + k, (1 - s) * m + k + 1) = x;
      }
    }
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues()[0];
}

} // namespace

TEST_CASE("uncoupled ground state") {
  for (int n : {1, 2, 3}) {
    const ReducedParams p = point(3.3, 0.0, 0.5, n, 4);
    const double g = ground({n, 4, 10}, p);
    CHECK_THAT(g, WithinAbs(n * p.spectrum.energies[0] + 0.5, 1e-10));
  }
}

TEST_CASE("single two-level dipole in the multipolar gauge is the Rabi model") {
  for (double eta : {0.2, 0.7, 1.3}) {
    const ReducedParams p = point(3.3, eta, 1.0, 1, 2);
    HilbertConfig cfg{1, 2, 50};
    cfg.zeta_squared = SquareConvention::SquareOfTruncated;
    const double z = p.spectrum.zeta(0, 1);
    // self-energy c zeta01^2 is a constant for two levels
    const double shift = eta * eta * z * z / (2.0 * p.energy_scale);
    const double g = derive_couplings(p).g_alpha;
    const double oracle =
        rabi_ground(p.spectrum.energies[0], p.spectrum.energies[1], 1.0, g, 50) + shift;
    CHECK_THAT(ground(cfg, p), WithinAbs(oracle, 1e-10));
  }
}

TEST_CASE("product basis at L = 2 equals the collective Dicke Hamiltonian") {
  for (int n : {1, 2, 3}) {
    for (double alpha : {0.0, 0.5, 1.0}) {
      const ReducedParams p = point(3.3, 1.0, alpha, n, 2);
      HilbertConfig prod{n, 2, 40};
      prod.zeta_squared = SquareConvention::SquareOfTruncated;
      HilbertConfig coll = prod;
      coll.representation = Representation::CollectiveSpin;
      const Spectrum a = lowest_eigenvalues(assemble(prod, p), 2);
      const Spectrum b = lowest_eigenvalues(dicke_two_level(coll, p), 2);
      CHECK_THAT(b.values[0], WithinAbs(a.values[0], 1e-10));
      CHECK_THAT(b.values[1], WithinAbs(a.values[1], 1e-10));
    }
  }
}

TEST_CASE("two-level truncation breaks gauge invariance") {
  HilbertConfig cfg{1, 2, 60};
  cfg.representation = Representation::CollectiveSpin;
  const double g0 = ground_energy(cfg, point(3.3, 1.0, 0.0, 1, 2));
  const double g1 = ground_energy(cfg, point(3.3, 1.0, 1.0, 1, 2));
  CHECK(std::abs(g0 - g1) > 1e-3);
}

TEST_CASE("assembled matrix structure") {
  const ReducedParams p = point(2.4, 0.9, 0.3, 2, 4);
  const AssembledHamiltonian h = assemble({2, 4, 12}, p);
  CHECK(h.dimension == 4 * 4 * 12);
  const SparseMatrix t = h.matrix.transpose();
  CHECK((SparseMatrix(h.matrix - t)).norm() < 1e-12);
  CHECK(h.label(0) == "|00,k=0>");
  CHECK(h.label(h.dimension - 1) == "|33,k=11>");

  const Eigen::VectorXd full =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Eigen::MatrixXd(h.matrix)).eigenvalues();
  const Spectrum s = lowest_eigenvalues(h, 6);
  for (int i = 0; i < 6; ++i)
    CHECK_THAT(s.values[i], WithinAbs(full[i], 1e-10));
  CHECK(s.parity[0] == 0);

  std::vector<int> idx;
  const SparseMatrix even = parity_block(h, 0, &idx);
  CHECK(even.rows() + parity_block(h, 1).rows() == h.dimension);
  for (int i : idx)
    CHECK(h.parity[i] == 0);
}

TEST_CASE("collective basis structure") {
  HilbertConfig cfg{4, 2, 20};
  cfg.representation = Representation::CollectiveSpin;
  const AssembledHamiltonian h = dicke_two_level(cfg, point(3.3, 0.8, 0.4, 4, 2));
  CHECK(h.dimension == 5 * 20);
  CHECK(h.label(21) == "|j+m=1,k=1>");
  const SparseMatrix t = h.matrix.transpose();
  CHECK((SparseMatrix(h.matrix - t)).norm() < 1e-12);
}

TEST_CASE("gauge-fixing transformation") {
  const HilbertConfig cfg{1, 10, 60};
  const ReducedParams p0 = point(3.3, 1.0, 0.0, 1, 10);
  const ReducedParams p1 = p0.with_alpha(1.0);

  const Eigen::MatrixXd id = gauge_fixing_unitary(cfg, p0, 0.4, 0.4);
  CHECK((id - Eigen::MatrixXd::Identity(600, 600)).norm() < 1e-14);

  const Eigen::MatrixXd r = gauge_fixing_unitary(cfg, p0, 0.0, 1.0);
  CHECK((r.transpose() * r - Eigen::MatrixXd::Identity(600, 600)).norm() < 1e-12);

  EigenOptions opts;
  opts.want_vectors = true;
  const Spectrum s0 = lowest_eigenvalues(assemble(cfg, p0), 1, opts);
  const Spectrum s1 = lowest_eigenvalues(assemble(cfg, p1), 1, opts);
  const Eigen::VectorXd mapped = r * s0.vectors.col(0);
  CHECK_THAT(std::abs(mapped.dot(s1.vectors.col(0))), WithinAbs(1.0, 1e-6));

  const Eigen::MatrixXd h0(assemble(cfg, p0).matrix);
  const Eigen::VectorXd back = r.transpose() * s1.vectors.col(0);
  CHECK_THAT(back.dot(h0 * back), WithinAbs(s1.values[0], 1e-6));

  CHECK_THROWS_AS(gauge_fixing_unitary({2, 10, 60}, point(3.3, 1.0, 0.0, 2, 10), 0.0, 1.0),
                  BudgetError);
}

TEST_CASE("cutoff convergence report") {
  const std::vector<std::pair<int, int>> ladder{{4, 20}, {6, 30}, {8, 40}};
  const ReducedParams free = point(3.3, 0.0, 1.0, 1, 8);
  const auto rows = convergence_report(ladder, {1, 2, 2}, free);
  REQUIRE(rows.size() == 3);
  for (const auto &r : rows)
    CHECK_THAT(r.ground, WithinAbs(free.spectrum.energies[0] + 0.5, 1e-10));
  CHECK_FALSE(rows[0].delta_ground.has_value());
  CHECK(rows[2].dimension == 320);

  const ReducedParams p = point(3.3, 1.0, 1.0, 2, 10);
  const auto conv = convergence_report({{8, 40}, {10, 60}}, {2, 2, 2}, p);
  CHECK(std::abs(*conv[1].delta_ground) <= 1e-6);
}

TEST_CASE("gauge invariance of the untruncated model") {
  for (double beta : {1.5, 2.4, 3.3}) {
    for (int n : {1, 2, 3}) {
      const ReducedParams base = point(beta, 0.0, 0.0, n, 10);
      const HilbertConfig cfg{n, 10, 60};
      for (double eta : {0.5, 1.0, 1.5}) {
        const double g0 = ground(cfg, base.with_eta(eta).with_alpha(0.0));
        const double g1 = ground(cfg, base.with_eta(eta).with_alpha(1.0));
        INFO("beta=" << beta << " N=" << n << " eta=" << eta);
        CHECK(std::abs(g0 - g1) <= 1e-5);
      }
    }
  }
}

TEST_CASE("self-energy convention assembles with its own spectrum") {
  ReducedParams p = point(3.3, 0.8, 0.6, 2, 6);
  const HilbertConfig cfg{2, 6, 30};
  CHECK_THROWS_AS(assemble(cfg, p, Convention::SelfEnergyInBare), ConventionMismatch);
  p.spectrum = convention_spectrum(p, Convention::SelfEnergyInBare, 6);
  CHECK_THROWS_AS(assemble(cfg, p), ConventionMismatch);
  CHECK_NOTHROW(assemble(cfg, p, Convention::SelfEnergyInBare));
  CHECK_THROWS_AS(assemble(cfg, p.with_alpha(0.2), Convention::SelfEnergyInBare),
                  ConventionMismatch);
}

TEST_CASE("Fock cutoff warning") {
  const ReducedParams p = point(3.3, 1.5, 0.0, 1, 4);
  const Spectrum small = low_levels_checked(assemble({1, 4, 4}, p));
  CHECK_FALSE(small.warnings.empty());
  const Spectrum large = low_levels_checked(assemble({1, 4, 60}, p.with_eta(0.3)));
  CHECK(large.warnings.empty());
}

TEST_CASE("sweeps and crossings") {
  const ReducedParams p = point(3.3, 0.0, 1.0, 1, 4);
  const HilbertConfig cfg{1, 4, 20};
  CHECK_THROWS_AS(transition_sweep(cfg, p, {0.5, 0.2}), GridError);
  CHECK_THROWS_AS(second_derivative_sweep(cfg, p, {0.0, 0.1, 0.3}), GridError);
  CHECK_THROWS_AS(second_derivative_sweep(cfg, p, {0.0, 0.1}), GridError);

  const auto rows = transition_sweep(cfg, p, {0.0, 0.5});
  CHECK_THAT(rows[0].gap, WithinAbs(1.0, 1e-10));
  CHECK_THAT(rows[0].gap_two_level, WithinAbs(1.0, 1e-10));

  const std::vector<CurvatureRow> a{{0.0, 1.0}, {1.0, -1.0}, {2.0, 0.0}};
  const std::vector<CurvatureRow> b{{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}};
  const auto x = crossings(a, b);
  REQUIRE(x.size() == 1);
  CHECK_THAT(x[0], WithinAbs(0.5, 1e-15));
}

TEST_CASE("configuration errors") {
  const ReducedParams p = point(3.3, 0.5, 1.0, 1, 4);
  CHECK_THROWS_AS(assemble({7, 2, 4}, p), BudgetError);
  HilbertConfig tight{1, 4, 40};
  tight.budget = 100;
  CHECK_THROWS_AS(assemble(tight, p), BudgetError);
  CHECK_THROWS_AS(assemble({2, 4, 10}, p), ValidationError);
  CHECK_THROWS_AS(assemble({1, 6, 10}, p), ValidationError);
  CHECK_THROWS_AS(assemble({1, 1, 10}, p), ValidationError);
}

TEST_CASE("triplet dump") {
  const AssembledHamiltonian h = assemble({1, 2, 3}, point(3.3, 0.5, 0.5, 1, 2));
  std::ostringstream os;
  write_triplets(os, h);
  std::istringstream is(os.str());
  std::string hash;
  int dim = 0, nnz = 0;
  is >> hash >> dim >> nnz;
  CHECK(hash == "#");
  CHECK(dim == 6);
  CHECK(nnz == h.matrix.nonZeros());
  int r, c, lines = 0;
  double v;
  while (is >> r >> c >> v) {
    CHECK(h.matrix.coeff(r, c) == v);
    ++lines;
  }
  CHECK(lines == nnz);
}
