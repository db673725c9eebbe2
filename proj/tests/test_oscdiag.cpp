#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "dicke/oscdiag.hpp"

using namespace dicke;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Independent route: nu^2 are the eigenvalues of -(Omega M)^2, each doubly degenerate.
std::pair<double, double> squared_route(const BilinearForm &f) {
  const Eigen::Matrix4d a = symplectic_form() * quadrature_matrix(f);
  Eigen::EigenSolver<Eigen::Matrix4d> es(-(a * a), false);
  std::array<double, 4> v{};
  for (int i = 0; i < 4; ++i)
    v[i] = std::max(0.0, es.eigenvalues()[i].real());
  std::sort(v.begin(), v.end());
  return {2.0 * std::sqrt(v[3]), 2.0 * std::sqrt(v[0])};
}

BilinearForm random_form(std::mt19937_64 &gen, bool same_sign) {
  std::uniform_real_distribution<double> freq(0.1, 10.0), frac(-0.99, 0.99);
  BilinearForm f;
  f.w = freq(gen);
  f.w_prime = freq(gen);
  const double bound = 0.5 * std::sqrt(f.w * f.w_prime);
  f.g = frac(gen) * bound;
  f.g_prime = frac(gen) * bound;
  if (same_sign && f.g * f.g_prime < 0.0)
    f.g_prime = -f.g_prime;
  return f;
}

} // namespace

TEST_CASE("decoupled oscillators return their own frequencies") {
  const PolaritonPair c = polariton_closed_form({1.0, 2.0, 0.0, 0.0, 0.0});
  CHECK(c.e_plus == 2.0);
  CHECK(c.e_minus == 1.0);
  CHECK(c.ground_shift == 0.0);
  const PolaritonPair w = williamson_frequencies({1.0, 2.0, 0.0, 0.0, 0.0});
  CHECK_THAT(w.e_plus, WithinAbs(2.0, 1e-14));
  CHECK_THAT(w.e_minus, WithinAbs(1.0, 1e-14));
}

TEST_CASE("weak symmetric coupling") {
  // 2E^2 = 0.08 + 2 +- sqrt(16 * 0.2 * 0.2) = 2.08 +- 0.8
  const BilinearForm f{1.0, 1.0, 0.1, 0.1, 0.0};
  const PolaritonPair c = polariton_closed_form(f);
  CHECK_THAT(c.e_plus, WithinRel(std::sqrt(1.44), 1e-14));
  CHECK_THAT(c.e_minus, WithinRel(std::sqrt(0.64), 1e-14));
  CHECK_THAT(c.e_plus, WithinRel(1.2, 1e-14));
  CHECK_THAT(c.e_minus, WithinRel(0.8, 1e-14));
  const PolaritonPair w = williamson_frequencies(f);
  CHECK_THAT(w.e_plus, WithinRel(c.e_plus, 1e-10));
  CHECK_THAT(w.e_minus, WithinRel(c.e_minus, 1e-10));
}

TEST_CASE("boundary form g = g' = sqrt(w w')/2 has a zero mode") {
  // 2E-^2 = 2 + 2 - sqrt(16) = 0 exactly; M is singular positive semi-definite
  const BilinearForm f{1.0, 1.0, 0.5, 0.5, 0.0};
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(quadrature_matrix(f));
  CHECK_THAT(es.eigenvalues().minCoeff(), WithinAbs(0.0, 1e-15));
  CHECK_FALSE(is_positive_definite(f));
  const PolaritonPair c = polariton_closed_form(f);
  CHECK(c.e_minus == 0.0);
  CHECK_THAT(c.e_plus, WithinRel(2.0, 1e-14));
  const PolaritonPair w = williamson_frequencies(f);
  CHECK_THAT(w.e_minus, WithinAbs(0.0, 1e-6));
  CHECK_THAT(w.e_plus, WithinRel(2.0, 1e-10));
}

TEST_CASE("unstable forms throw InstabilityError") {
  const BilinearForm f{1.0, 1.0, 0.6, 0.6, 0.0};
  CHECK_THROWS_AS(polariton_closed_form(f), InstabilityError);
  CHECK_THROWS_AS(williamson_frequencies(f), InstabilityError);
  CHECK_THROWS_AS(polariton_closed_form({1.0, 1.0, 10.0, 10.0, 0.0}), InstabilityError);
}

TEST_CASE("invalid forms are rejected") {
  CHECK_THROWS_AS(polariton_closed_form({0.0, 1.0, 0.0, 0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(williamson_frequencies({1.0, -1.0, 0.0, 0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(polariton_closed_form({1.0, 1.0, NAN, 0.0, 0.0}), ValidationError);
}

TEST_CASE("positive-definiteness examples") {
  CHECK(is_positive_definite({1.0, 1.0, 0.0, 0.0, 0.0}));
  CHECK_FALSE(is_positive_definite({1.0, 1.0, 10.0, 10.0, 0.0}));
  // blocks [[0.1, 0.1], [0.1, 5]] / 2: det = 0.49 > 0
  CHECK(is_positive_definite({0.1, 5.0, 0.05, 0.05, 0.0}));
  CHECK_FALSE(is_positive_definite({1.0, 1.0, INFINITY, 0.0, 0.0}));
}

TEST_CASE("ground shift carries the constant") {
  const BilinearForm f{1.0, 1.0, 0.1, 0.1, 0.25};
  const PolaritonPair c = polariton_closed_form(f);
  CHECK_THAT(c.ground_shift, WithinAbs(0.5 * (1.2 + 0.8 - 2.0) + 0.25, 1e-14));
}

TEST_CASE("closed form, Williamson and squared routes agree on random forms") {
  std::mt19937_64 gen(20240611);
  for (int i = 0; i < 2000; ++i) {
    const BilinearForm f = random_form(gen, i % 2 == 0);
    REQUIRE(is_positive_definite(f));
    const PolaritonPair c = polariton_closed_form(f);
    const PolaritonPair w = williamson_frequencies(f);
    const auto [sp, sm] = squared_route(f);
    CHECK_THAT(w.e_plus, WithinRel(c.e_plus, 1e-10));
    CHECK_THAT(w.e_minus, WithinRel(c.e_minus, 1e-10));
    CHECK_THAT(sp, WithinRel(c.e_plus, 1e-8));
    CHECK_THAT(sm, WithinRel(c.e_minus, 1e-6));
    CHECK(c.e_plus >= c.e_minus);
    CHECK(c.e_minus >= 0.0);
  }
}

TEST_CASE("simultaneous swap of (w, g) with (w', g') leaves E+- invariant") {
  std::mt19937_64 gen(7);
  for (int i = 0; i < 500; ++i) {
    const BilinearForm f = random_form(gen, true);
    const BilinearForm s{f.w_prime, f.w, f.g_prime, f.g, f.c};
    const PolaritonPair a = polariton_closed_form(f);
    const PolaritonPair b = polariton_closed_form(s);
    CHECK_THAT(b.e_plus, WithinRel(a.e_plus, 1e-13));
    CHECK_THAT(b.e_minus, WithinRel(a.e_minus, 1e-12));
  }
}

TEST_CASE("E+- are continuous in every field") {
  std::mt19937_64 gen(11);
  for (int i = 0; i < 200; ++i) {
    const BilinearForm f = random_form(gen, true);
    const PolaritonPair base = polariton_closed_form(f);
    for (int field = 0; field < 4; ++field) {
      BilinearForm d = f;
      double *x = field == 0 ? &d.w : field == 1 ? &d.w_prime : field == 2 ? &d.g : &d.g_prime;
      *x += 1e-9;
      const PolaritonPair p = polariton_closed_form(d);
      CHECK(std::abs(p.e_plus - base.e_plus) < 1e-6);
      CHECK(std::abs(p.e_minus - base.e_minus) < 1e-6);
    }
  }
}
