#pragma once

#include "cedtest/bootstrap.hpp"
#include "cedtest/types.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cedtest::sim {

// Regression models for the size/power study. In every setting
// Y = intercept + slope * X + eps; the settings differ in the covariate law,
// the noise law, and which of these change between the groups under the
// alternative. N(a, b) is read as mean a, variance b.
enum class Setting { A, B, C, D };
enum class Hypothesis { Null, Alternative };

std::string_view to_string(Setting s);
std::string_view to_string(Hypothesis h);
Setting setting_from_string(std::string_view name);
Hypothesis hypothesis_from_string(std::string_view name);

struct SimSetting {
  Setting setting = Setting::A;
  Hypothesis hypothesis = Hypothesis::Null;
  std::size_t n1 = 50;
  std::size_t n2 = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

std::pair<Sample, Sample> generate_setting(const SimSetting& s, std::mt19937_64& rng);

// Seeds its own generator from s.seed.
std::pair<Sample, Sample> generate_setting(const SimSetting& s);

struct MeasureReport {
  MeasureChoice measure;
  std::vector<double> rejection_rate;  // one per alpha
  std::vector<double> standard_error;  // sqrt(r (1 - r) / reps)
  std::vector<double> p_values;        // one per replicate, in replicate order
};

struct SimReport {
  Setting setting = Setting::A;
  Hypothesis hypothesis = Hypothesis::Null;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::size_t bootstrap_replicates = 0;
  std::vector<double> alphas;
  std::vector<MeasureReport> measures;
  double wall_time_ms = 0.0;
};

struct ExperimentConfig {
  std::size_t reps = 200;
  std::vector<double> alphas{0.05, 0.10};
  std::vector<MeasureChoice> measures{MeasureChoice::euclidean()};
  TestConfig test;  // test.measure and test.seed are overridden per run
  unsigned threads = 1;
};

// Runs the local-bootstrap test on `reps` independent draws from the
// setting (data and bootstrap seeds derived from s.seed and the replicate
// index). Every measure is applied to the same draws. A p-value <= alpha
// counts as a rejection.
SimReport rejection_experiment(const SimSetting& s, const ExperimentConfig& cfg);

// Fixed-width text rendering in the layout of a size/power table.
std::string format_table(const std::vector<SimReport>& reports);

}  // namespace cedtest::sim
