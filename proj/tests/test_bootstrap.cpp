#include "cedtest/bootstrap.hpp"
#include "cedtest/errors.hpp"
#include "cedtest/iced.hpp"
#include "cedtest/rng.hpp"

#include "doctest.h"
#include "test_support.hpp"

#include <cmath>
#include <random>

using namespace cedtest;
using cedtest::testing::column;
using cedtest::testing::rel_err;

TEST_CASE("p-value formula") {
  const std::vector<double> reps{0.1, 0.2, 0.3};
  CHECK(bootstrap_p_value(1.0, reps) == 0.25);
  CHECK(bootstrap_p_value(-1.0, reps) == 1.0);
  // ties do not count
  CHECK(bootstrap_p_value(0.2, reps) == 0.5);
  const std::vector<double> low(299, -1.0);
  CHECK(bootstrap_p_value(0.0, low) == doctest::Approx(1.0 / 300.0).epsilon(1e-15));
}

TEST_CASE("pooled bandwidths") {
  const auto rot = BandwidthRule::rule_of_thumb();
  SUBCASE("disjoint singletons") {
    const BandwidthVector h = pooled_bandwidths(column({0.0}), column({1.0}), rot);
    CHECK(h[0] == doctest::Approx(1.06 * std::sqrt(0.5) * std::pow(2.0, -0.2)).epsilon(1e-14));
  }
  SUBCASE("identical covariates") {
    std::mt19937_64 rng(1);
    const Matrix x = cedtest::testing::normal_matrix(rng, 30, 2);
    const BandwidthVector h = pooled_bandwidths(x, x, rot);
    const BandwidthVector direct = rot_bandwidths(stack_rows(x, x));
    CHECK(h == direct);
    // n doubles and the n-1 standard deviation shrinks slightly:
    // sd_2n^2 = sd_n^2 (2n - 2) / (2n - 1).
    const BandwidthVector one = rot_bandwidths(x);
    const double sd_ratio = std::sqrt((2.0 * 30 - 2.0) / (2.0 * 30 - 1.0));
    for (std::size_t r = 0; r < 2; ++r) {
      CHECK(h[r] == doctest::Approx(one[r] * sd_ratio * std::pow(2.0, -1.0 / 6.0)).epsilon(1e-13));
    }
  }
  SUBCASE("row order does not matter") {
    std::mt19937_64 rng(2);
    const Matrix a = cedtest::testing::normal_matrix(rng, 10, 1);
    const Matrix b = cedtest::testing::normal_matrix(rng, 12, 1);
    const BandwidthVector h = pooled_bandwidths(a, b, rot);
    CHECK(rel_err(pooled_bandwidths(b, a, rot)[0], h[0]) < 1e-14);
    CHECK(rel_err(pooled_bandwidths(a, b, BandwidthRule::lscv({0.5, 1.0, 2.0}))[0],
                  pooled_bandwidths(b, a, BandwidthRule::lscv({0.5, 1.0, 2.0}))[0]) < 1e-14);
  }
  SUBCASE("degenerate") {
    CHECK_THROWS_AS(pooled_bandwidths(column({1.0}), column({1.0}), rot), DegenerateDataError);
  }
}

TEST_CASE("local resampling") {
  SUBCASE("tiny rectangular window keeps every response") {
    const Sample s1(column({1.0, 2.0, 3.0}), column({0.0, 1.0, 2.0}));
    const Sample s2(column({4.0, 5.0}), column({0.5, 1.5}));
    const BandwidthVector h({0.1});
    for (std::uint64_t r = 0; r < 20; ++r) {
      const auto [a, b] = local_resample(s1, s2, h, KernelFamily::Rectangular, {9, r});
      CHECK(a.y == s1.y);
      CHECK(b.y == s2.y);
      CHECK(a.x == s1.x);
      CHECK(b.x == s2.x);
    }
  }
  SUBCASE("two points at the same covariate are equally likely") {
    const Sample s1(column({-1.0}), column({0.3}));
    const Sample s2(column({1.0}), column({0.3}));
    const LocalResampler sampler(s1.x, s2.x, BandwidthVector({1.0}), KernelFamily::Gaussian);
    const auto p = sampler.probabilities(0, 0);
    CHECK(p.size() == 2);
    CHECK(p[0] == 0.5);
    CHECK(p[1] == 0.5);
    int first = 0;
    const int draws = 20000;
    for (int r = 0; r < draws; ++r) first += sampler.draw_one(1, 0, {5, static_cast<std::uint64_t>(r)}) == 0;
    CHECK(std::abs(first / double(draws) - 0.5) < 3.0 * std::sqrt(0.25 / draws));
  }
  SUBCASE("selection frequencies match the kernel weights") {
    std::mt19937_64 rng(12);
    const Matrix x1 = cedtest::testing::normal_matrix(rng, 5, 1);
    const Matrix x2 = cedtest::testing::normal_matrix(rng, 4, 1);
    const BandwidthVector h({0.7});
    const LocalResampler sampler(x1, x2, h, KernelFamily::Gaussian);
    // Exact weights computed independently.
    const Matrix pooled = stack_rows(x1, x2);
    std::vector<double> w;
    double total = 0.0;
    for (Eigen::Index j = 0; j < 9; ++j) {
      const double u = (pooled(j, 0) - x2(1, 0)) / 0.7;
      w.push_back(std::exp(-0.5 * u * u));
      total += w.back();
    }
    const auto p = sampler.probabilities(1, 1);
    for (std::size_t j = 0; j < 9; ++j) CHECK(p[j] == doctest::Approx(w[j] / total).epsilon(1e-12));

    const int draws = 100000;
    std::vector<int> counts(9, 0);
    for (int r = 0; r < draws; ++r) ++counts[sampler.draw_one(1, 1, {77, static_cast<std::uint64_t>(r)})];
    for (std::size_t j = 0; j < 9; ++j) {
      const double pj = w[j] / total;
      const double se = std::sqrt(pj * (1.0 - pj) / draws);
      CHECK(std::abs(counts[j] / double(draws) - pj) <= 3.0 * se);
    }
  }
  SUBCASE("isolated target with compact support keeps its own response") {
    // The target is itself a pooled row, so its weight never vanishes.
    const Sample s1(column({1.0, 2.0}), column({0.0, 0.1}));
    const Sample s2(column({1.0, 2.0}), column({0.05, 9.0}));
    const LocalResampler sampler(s1.x, s2.x, BandwidthVector({0.5}), KernelFamily::Rectangular);
    const auto p = sampler.probabilities(1, 1);
    CHECK(p[3] == 1.0);
    CHECK(sampler.draw_one(1, 1, {1, 1}) == 3);
  }
  SUBCASE("draws depend only on the stream key") {
    std::mt19937_64 rng(8);
    const Sample s1 = cedtest::testing::random_sample(rng, 6, 1, 1);
    const Sample s2 = cedtest::testing::random_sample(rng, 7, 1, 1);
    const LocalResampler sampler(s1.x, s2.x, BandwidthVector({0.8}), KernelFamily::Gaussian);
    const auto [r1, r2] = sampler.draw({3, 4});
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i] == sampler.draw_one(0, i, {3, 4}));
    for (std::size_t i = 0; i < r2.size(); ++i) CHECK(r2[i] == sampler.draw_one(1, i, {3, 4}));
  }
}

TEST_CASE("configuration validation") {
  TestConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TestConfig{};
  cfg.bandwidth_rule = BandwidthRule::lscv({});
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = TestConfig{};
  cfg.measure = MeasureChoice::rkhs_fixed(-1.0);
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  std::mt19937_64 rng(1);
  const Sample s1 = cedtest::testing::random_sample(rng, 5, 1, 1);
  const Sample s2 = cedtest::testing::random_sample(rng, 5, 1, 1);
  TestConfig zero;
  zero.replicates = 0;
  CHECK_THROWS_AS(run_test(s1, s2, zero), ConfigError);
}

TEST_CASE("full test") {
  std::mt19937_64 rng(2718);
  const Sample s1 = cedtest::testing::random_sample(rng, 30, 1, 1);
  const Sample s2 = cedtest::testing::random_sample(rng, 25, 1, 1, 0.5);
  TestConfig cfg;
  cfg.replicates = 59;
  cfg.seed = 123;

  const TestResult r = run_test(s1, s2, cfg);
  CHECK(r.replicates.size() == 59);
  CHECK(r.n1 == 30);
  CHECK(r.n2 == 25);
  CHECK(r.seed == 123);
  CHECK(r.p_value >= 1.0 / 60.0);
  CHECK(r.p_value <= 1.0);
  CHECK(r.p_value == bootstrap_p_value(r.statistic, r.replicates));
  CHECK(!r.gamma.has_value());

  SUBCASE("statistic equals the fast evaluator with the reported bandwidths") {
    const SmoothingSpec spec1{cfg.family, r.bandwidths1};
    const SmoothingSpec spec2{cfg.family, r.bandwidths2};
    CHECK(rel_err(r.statistic, iced_fast(s1, s2, spec1, spec2, Dissimilarity::euclidean()).value) < 1e-12);
    CHECK(r.bandwidths1 == rot_bandwidths(s1.x));
    CHECK(r.pooled_bandwidths == rot_bandwidths(stack_rows(s1.x, s2.x)));
  }
  SUBCASE("thread count never changes the result") {
    TestConfig many = cfg;
    many.threads = 8;
    const TestResult r8 = run_test(s1, s2, many);
    CHECK(r8.statistic == r.statistic);
    CHECK(r8.replicates == r.replicates);
    CHECK(r8.p_value == r.p_value);
  }
  SUBCASE("statistic is invariant to row order") {
    const TestResult p = run_test(cedtest::testing::permute_rows(s1, rng),
                                  cedtest::testing::permute_rows(s2, rng), cfg);
    CHECK(rel_err(p.statistic, r.statistic) < 1e-12);
  }
  SUBCASE("median-heuristic scale") {
    TestConfig rk = cfg;
    rk.measure = MeasureChoice::rkhs_median();
    const TestResult rr = run_test(s1, s2, rk);
    REQUIRE(rr.gamma.has_value());
    CHECK(*rr.gamma == median_heuristic(stack_rows(s1.y, s2.y)));
    const SmoothingSpec spec1{cfg.family, rr.bandwidths1};
    const SmoothingSpec spec2{cfg.family, rr.bandwidths2};
    CHECK(rel_err(rr.statistic,
                  iced_fast(s1, s2, spec1, spec2, Dissimilarity::neg_gaussian_rkhs(*rr.gamma)).value) < 1e-12);
  }
  SUBCASE("pooled scope uses one bandwidth for both samples") {
    TestConfig pooled = cfg;
    pooled.bandwidth_scope = BandwidthScope::Pooled;
    const TestResult rp = run_test(s1, s2, pooled);
    CHECK(rp.bandwidths1 == rp.bandwidths2);
    CHECK(rp.bandwidths1 == rp.pooled_bandwidths);
  }
  SUBCASE("a clear shift is detected") {
    const Sample far = cedtest::testing::random_sample(rng, 25, 1, 1, 4.0);
    const TestResult shifted = run_test(s1, far, cfg);
    CHECK(shifted.p_value == doctest::Approx(1.0 / 60.0));
  }
}

TEST_CASE("stream seeds") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  SplitMix64 g(42);
  for (int k = 0; k < 1000; ++k) {
    const double u = g.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}
