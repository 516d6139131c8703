#include "cedtest/errors.hpp"
#include "cedtest/measures.hpp"
#include "cedtest/oracle.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace cedtest;
using cedtest::testing::column;
using cedtest::testing::rel_err;

namespace {

constexpr double kPi = std::numbers::pi;

// Gamma at positive integers and half-integers by the recurrence
// Gamma(a + 1) = a Gamma(a) from Gamma(1) = 1 and Gamma(1/2) = sqrt(pi).
double gamma_half_integer(double a) {
  double value = std::abs(a - std::round(a)) < 1e-12 ? 1.0 : std::sqrt(kPi);
  double base = std::abs(a - std::round(a)) < 1e-12 ? 1.0 : 0.5;
  while (base < a - 1e-12) {
    value *= base;
    base += 1.0;
  }
  return value;
}

}  // namespace

TEST_CASE("energy weight constant") {
  CHECK(oracle::weight_constant_cq(1) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(oracle::weight_constant_cq(2) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(oracle::weight_constant_cq(3) == doctest::Approx(kPi * kPi).epsilon(1e-15));
  CHECK_THROWS_AS(oracle::weight_constant_cq(0), DomainError);
  for (int q = 1; q <= 10; ++q) {
    const double a = 0.5 * (q + 1);
    CHECK(rel_err(oracle::weight_constant_cq(q), std::pow(kPi, a) / gamma_half_integer(a)) < 1e-12);
  }
}

TEST_CASE("distance integral constant") {
  CHECK(oracle::distance_integral_constant(1, 1.0) == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(oracle::distance_integral_constant(2, 1.0) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK_THROWS_AS(oracle::distance_integral_constant(1, 0.0), DomainError);
  CHECK_THROWS_AS(oracle::distance_integral_constant(1, 2.0), DomainError);
  CHECK_THROWS_AS(oracle::distance_integral_constant(0, 1.0), DomainError);
  for (int q = 1; q <= 10; ++q) {
    // alpha = 1: 2 pi^(q/2) Gamma(1/2) / (2 Gamma((q+1)/2))
    const double expected = std::pow(kPi, 0.5 * q) * std::sqrt(kPi) / gamma_half_integer(0.5 * (q + 1));
    CHECK(rel_err(oracle::distance_integral_constant(q, 1.0), expected) < 1e-12);
    // with alpha = 1 the two constants coincide
    CHECK(rel_err(oracle::distance_integral_constant(q, 1.0), oracle::weight_constant_cq(q)) < 1e-12);
  }
}

TEST_CASE("distance integral identity at q = 1") {
  const oracle::QuadratureSpec quad;
  for (double y : {0.5, 1.0, 2.0, -2.0}) {
    const double integral = oracle::line_integral(
        [y](double t) { return (1.0 - std::cos(t * y)) / (t * t); }, quad, 0.5 * y * y, 1.0);
    CHECK(std::abs(integral - oracle::distance_integral_constant(1, 1.0) * std::abs(y)) < 1e-3);
  }
}

TEST_CASE("quadrature spec validation") {
  oracle::QuadratureSpec q;
  CHECK_NOTHROW(q.validate());
  q.n_nodes = 8;
  CHECK_THROWS_AS(q.validate(), ConfigError);
  q = {};
  q.eps = 300.0;
  CHECK_THROWS_AS(q.validate(), ConfigError);
}

TEST_CASE("characteristic-function quadrature") {
  const SmoothingSpec spec{KernelFamily::Gaussian, BandwidthVector({1.0})};
  const std::vector<double> x{0.2};
  const Sample s1(column({0.4, -1.1, 2.0}), column({0.0, 0.5, -0.3}));
  const Sample s2(column({1.7, 0.9, -0.2}), column({0.1, -0.6, 0.8}));

  SUBCASE("identical samples") {
    CHECK(std::abs(oracle::ced_v_quadrature(x, s1, s1, spec, spec)) <= 1e-12);
  }
  SUBCASE("matches the closed form") {
    const double closed = ced_v_at(x, s1, s2, spec, spec, Dissimilarity::euclidean());
    const double quad = oracle::ced_v_quadrature(x, s1, s2, spec, spec);
    MESSAGE("closed " << closed << " quadrature " << quad);
    CHECK(std::abs(quad - closed) <= 1e-3 * std::max(1.0, std::abs(closed)));
  }
  SUBCASE("origin exclusion is converged") {
    oracle::QuadratureSpec a;
    oracle::QuadratureSpec b;
    b.eps = a.eps / 2.0;
    CHECK(std::abs(oracle::ced_v_quadrature(x, s1, s2, spec, spec, a) -
                   oracle::ced_v_quadrature(x, s1, s2, spec, spec, b)) < 1e-6);
  }
  SUBCASE("q > 1 rejected") {
    const Sample w1(Matrix::Ones(3, 2), s1.x);
    const Sample w2(Matrix::Zero(3, 2), s2.x);
    CHECK_THROWS_AS(oracle::ced_v_quadrature(x, w1, w2, spec, spec), DomainError);
  }
}

TEST_CASE("quadrature agrees with the closed form on random instances") {
  std::mt19937_64 rng(515);
  std::uniform_int_distribution<int> nd(1, 6);
  // Nearby response values beat slowly, so truncate far out.
  oracle::QuadratureSpec quad;
  quad.t_max = 2000.0;
  quad.n_nodes = 400000;
  for (int rep = 0; rep < 20; ++rep) {
    const int p = 1 + rep % 2;
    const Sample s1 = cedtest::testing::random_sample(rng, nd(rng), 1, p);
    const Sample s2 = cedtest::testing::random_sample(rng, nd(rng), 1, p, 0.7);
    const KernelFamily f = rep % 3 == 0 ? KernelFamily::Gaussian : KernelFamily::Epanechnikov;
    const Matrix both = stack_rows(s1.x, s2.x);
    const SmoothingSpec spec1 = cedtest::testing::wide_spec(f, both, 1.5);
    const SmoothingSpec spec2 = cedtest::testing::wide_spec(f, both, 1.7);
    const std::vector<double> x(static_cast<std::size_t>(p), 0.0);
    const double closed = ced_v_at(x, s1, s2, spec1, spec2, Dissimilarity::euclidean());
    const double numeric = oracle::ced_v_quadrature(x, s1, s2, spec1, spec2, quad);
    CHECK(rel_err(numeric, closed) <= 1e-3);
  }
}
