#pragma once

#include "cedtest/iced.hpp"
#include "cedtest/measures.hpp"
#include "cedtest/smoothing.hpp"
#include "cedtest/types.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace cedtest {

// Which response dissimilarity the test uses, and how its scale is chosen.
struct MeasureChoice {
  enum class Kind { Euclidean, RkhsMedian, RkhsFixed };
  Kind kind = Kind::Euclidean;
  double gamma = 0.0;  // RkhsFixed only

  static MeasureChoice euclidean() { return {}; }
  static MeasureChoice rkhs_median() { return {Kind::RkhsMedian, 0.0}; }
  static MeasureChoice rkhs_fixed(double gamma) { return {Kind::RkhsFixed, gamma}; }
};

std::string_view to_string(MeasureChoice::Kind kind);

// Whether the statistic's bandwidths come from each sample separately or
// from the pooled covariates.
enum class BandwidthScope { PerSample, Pooled };

struct TestConfig {
  std::size_t replicates = 299;  // B
  std::uint64_t seed = 0;
  MeasureChoice measure;
  BandwidthRule bandwidth_rule;
  BandwidthScope bandwidth_scope = BandwidthScope::PerSample;
  BandwidthRule pooled_rule;  // defines K^pool for the resampling step
  KernelFamily family = KernelFamily::Gaussian;
  unsigned threads = 1;  // 0 = hardware concurrency; never affects results

  // Throws ConfigError on B == 0, an empty LSCV grid, or a bad fixed gamma.
  void validate() const;
};

struct TestResult {
  double statistic = 0.0;
  std::vector<double> replicates;
  double p_value = 1.0;
  std::uint64_t seed = 0;
  MeasureChoice measure;
  std::optional<double> gamma;  // set for the RKHS measures
  BandwidthVector bandwidths1;
  BandwidthVector bandwidths2;
  BandwidthVector pooled_bandwidths;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

// (#{replicate > observed} + 1) / (B + 1), strict inequality.
double bootstrap_p_value(double observed, std::span<const double> replicates);

// Applies the rule to the row-concatenation of the two covariate matrices.
BandwidthVector pooled_bandwidths(const Matrix& x1, const Matrix& x2, const BandwidthRule& rule,
                                  KernelFamily family = KernelFamily::Gaussian);

// Identifies the random stream for one bootstrap replicate. Every
// observation draws from its own stream keyed by
// (seed, replicate, sample id, row), so draws are independent of
// evaluation order and thread count.
struct ReplicateStream {
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
};

// Precomputed sampling tables for the local bootstrap. For each target
// observation, holds the cumulative pooled kernel weights
// K^pool(X_j - X_target) over the pooled rows (sample 1 first).
class LocalResampler {
 public:
  LocalResampler(const Matrix& x1, const Matrix& x2, const BandwidthVector& hpool,
                 KernelFamily family);

  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }

  // Selection probabilities for target `row` of sample `sample_id` (0 or 1).
  std::vector<double> probabilities(int sample_id, std::size_t row) const;

  // Pooled row indices selected for each observation of each sample.
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> draw(
      const ReplicateStream& stream) const;

  std::size_t draw_one(int sample_id, std::size_t row, const ReplicateStream& stream) const;

 private:
  std::size_t n1_;
  std::size_t n2_;
  Matrix cumulative_;  // (n1 + n2) targets x (n1 + n2) pooled rows
};

// Redraws every response from the kernel-weighted pooled empirical
// conditional distribution at its own covariate; covariates are copied.
std::pair<Sample, Sample> local_resample(const Sample& s1, const Sample& s2,
                                         const BandwidthVector& hpool, KernelFamily family,
                                         const ReplicateStream& stream);

// Full local-bootstrap test of equal conditional distributions.
TestResult run_test(const Sample& s1, const Sample& s2, const TestConfig& cfg);

}  // namespace cedtest
