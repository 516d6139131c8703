#include "cedtest/bootstrap.hpp"

#include "cedtest/errors.hpp"
#include "cedtest/parallel.hpp"
#include "cedtest/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cedtest {

namespace {

std::span<const double> row_span(const Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

Matrix gather_rows(const Matrix& pooled, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), pooled.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = pooled.row(static_cast<Eigen::Index>(rows[k]));
  }
  return out;
}

void validate_rule(const BandwidthRule& rule) {
  if (rule.kind != BandwidthRule::Kind::Lscv) return;
  if (rule.grid.empty()) throw ConfigError("LSCV bandwidth rule needs a nonempty grid");
  for (double g : rule.grid) {
    if (!(std::isfinite(g) && g > 0.0)) throw ConfigError("LSCV grid factors must be positive");
  }
}

}  // namespace

std::string_view to_string(MeasureChoice::Kind kind) {
  switch (kind) {
    case MeasureChoice::Kind::Euclidean:
      return "ced";
    case MeasureChoice::Kind::RkhsMedian:
      return "rkhs-median";
    case MeasureChoice::Kind::RkhsFixed:
      return "rkhs-fixed";
  }
  return "unknown";
}

void TestConfig::validate() const {
  if (replicates < 1) throw ConfigError("number of bootstrap replicates B must be at least 1");
  validate_rule(bandwidth_rule);
  validate_rule(pooled_rule);
  if (measure.kind == MeasureChoice::Kind::RkhsFixed &&
      !(std::isfinite(measure.gamma) && measure.gamma > 0.0)) {
    throw ConfigError("fixed RKHS scale gamma must be positive and finite");
  }
}

double bootstrap_p_value(double observed, std::span<const double> replicates) {
  const auto exceed = std::count_if(replicates.begin(), replicates.end(),
                                    [observed](double r) { return r > observed; });
  return (static_cast<double>(exceed) + 1.0) / (static_cast<double>(replicates.size()) + 1.0);
}

BandwidthVector pooled_bandwidths(const Matrix& x1, const Matrix& x2, const BandwidthRule& rule,
                                  KernelFamily family) {
  if (x1.rows() + x2.rows() < 2) {
    throw InvalidArgument("pooled bandwidths need at least two observations");
  }
  return select_bandwidths(stack_rows(x1, x2), rule, family);
}

LocalResampler::LocalResampler(const Matrix& x1, const Matrix& x2, const BandwidthVector& hpool,
                               KernelFamily family)
    : n1_(static_cast<std::size_t>(x1.rows())), n2_(static_cast<std::size_t>(x2.rows())) {
  if (x1.cols() != x2.cols()) throw DimensionError("covariate dimensions differ");
  const Matrix pooled = stack_rows(x1, x2);
  const SmoothingSpec spec{family, hpool};
  const Eigen::Index total = pooled.rows();
  cumulative_.resize(total, total);
  for (Eigen::Index t = 0; t < total; ++t) {
    double running = 0.0;
    for (Eigen::Index j = 0; j < total; ++j) {
      running += product_kernel_diff(row_span(pooled, j), row_span(pooled, t), spec);
      cumulative_(t, j) = running;
    }
    if (!(running > 0.0)) {
      const bool first = static_cast<std::size_t>(t) < n1_;
      const std::size_t row = first ? static_cast<std::size_t>(t) : static_cast<std::size_t>(t) - n1_;
      throw ResampleError("no pooled kernel weight around observation " + std::to_string(row) +
                          " of sample " + (first ? "1" : "2") + "; widen the pooled bandwidths");
    }
  }
}

std::vector<double> LocalResampler::probabilities(int sample_id, std::size_t row) const {
  const std::size_t target = sample_id == 0 ? row : n1_ + row;
  if ((sample_id != 0 && sample_id != 1) || row >= (sample_id == 0 ? n1_ : n2_)) {
    throw InvalidArgument("resampling target out of range");
  }
  const auto t = static_cast<Eigen::Index>(target);
  const Eigen::Index total = cumulative_.cols();
  const double sum = cumulative_(t, total - 1);
  std::vector<double> p(static_cast<std::size_t>(total));
  double prev = 0.0;
  for (Eigen::Index j = 0; j < total; ++j) {
    p[static_cast<std::size_t>(j)] = (cumulative_(t, j) - prev) / sum;
    prev = cumulative_(t, j);
  }
  return p;
}

std::size_t LocalResampler::draw_one(int sample_id, std::size_t row,
                                     const ReplicateStream& stream) const {
  const std::size_t target = sample_id == 0 ? row : n1_ + row;
  const auto t = static_cast<Eigen::Index>(target);
  const Eigen::Index total = cumulative_.cols();
  SplitMix64 rng(derive_seed(stream.seed, stream.replicate, sample_id, row));
  const double u = rng.uniform() * cumulative_(t, total - 1);
  const double* begin = cumulative_.data() + t * total;
  const double* hit = std::upper_bound(begin, begin + total, u);
  // u < total weight, so hit is in range except for rounding at the top.
  const auto idx = static_cast<std::size_t>(std::min<std::ptrdiff_t>(hit - begin, total - 1));
  return idx;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> LocalResampler::draw(
    const ReplicateStream& stream) const {
  std::vector<std::size_t> rows1(n1_);
  std::vector<std::size_t> rows2(n2_);
  for (std::size_t i = 0; i < n1_; ++i) rows1[i] = draw_one(0, i, stream);
  for (std::size_t i = 0; i < n2_; ++i) rows2[i] = draw_one(1, i, stream);
  return {std::move(rows1), std::move(rows2)};
}

std::pair<Sample, Sample> local_resample(const Sample& s1, const Sample& s2,
                                         const BandwidthVector& hpool, KernelFamily family,
                                         const ReplicateStream& stream) {
  check_compatible(s1, s2);
  const LocalResampler sampler(s1.x, s2.x, hpool, family);
  const auto [rows1, rows2] = sampler.draw(stream);
  const Matrix pooled_y = stack_rows(s1.y, s2.y);
  return {Sample(gather_rows(pooled_y, rows1), s1.x), Sample(gather_rows(pooled_y, rows2), s2.x)};
}

TestResult run_test(const Sample& s1, const Sample& s2, const TestConfig& cfg) {
  cfg.validate();
  check_compatible(s1, s2);
  if (s1.size() < 2 || s2.size() < 2) {
    throw InvalidArgument("each sample needs at least two observations");
  }

  TestResult result;
  result.seed = cfg.seed;
  result.measure = cfg.measure;
  result.n1 = s1.size();
  result.n2 = s2.size();

  if (cfg.bandwidth_scope == BandwidthScope::PerSample) {
    result.bandwidths1 = select_bandwidths(s1.x, cfg.bandwidth_rule, cfg.family);
    result.bandwidths2 = select_bandwidths(s2.x, cfg.bandwidth_rule, cfg.family);
  } else {
    result.bandwidths1 = pooled_bandwidths(s1.x, s2.x, cfg.bandwidth_rule, cfg.family);
    result.bandwidths2 = result.bandwidths1;
  }
  result.pooled_bandwidths = pooled_bandwidths(s1.x, s2.x, cfg.pooled_rule, cfg.family);

  const Matrix pooled_y = stack_rows(s1.y, s2.y);
  Dissimilarity d = Dissimilarity::euclidean();
  switch (cfg.measure.kind) {
    case MeasureChoice::Kind::Euclidean:
      break;
    case MeasureChoice::Kind::RkhsMedian:
      result.gamma = median_heuristic(pooled_y);
      d = Dissimilarity::neg_gaussian_rkhs(*result.gamma);
      break;
    case MeasureChoice::Kind::RkhsFixed:
      result.gamma = cfg.measure.gamma;
      d = Dissimilarity::neg_gaussian_rkhs(cfg.measure.gamma);
      break;
  }

  const SmoothingSpec spec1{cfg.family, result.bandwidths1};
  const SmoothingSpec spec2{cfg.family, result.bandwidths2};
  const IcedWeights weights(s1.x, s2.x, spec1, spec2);
  const Matrix pooled_d = dissimilarity_matrix(pooled_y, pooled_y, d);

  // The observed responses are pooled rows 0..n1-1 and n1..n1+n2-1, so the
  // observed statistic goes through the same indexed contraction as the
  // replicates.
  std::vector<std::size_t> own1(result.n1);
  std::vector<std::size_t> own2(result.n2);
  for (std::size_t i = 0; i < result.n1; ++i) own1[i] = i;
  for (std::size_t i = 0; i < result.n2; ++i) own2[i] = result.n1 + i;
  result.statistic = weights.evaluate_indexed(pooled_d, own1, own2);

  const LocalResampler sampler(s1.x, s2.x, result.pooled_bandwidths, cfg.family);
  result.replicates.assign(cfg.replicates, 0.0);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t b) {
    const auto [rows1, rows2] = sampler.draw(ReplicateStream{cfg.seed, b});
    result.replicates[b] = weights.evaluate_indexed(pooled_d, rows1, rows2);
  });
  result.p_value = bootstrap_p_value(result.statistic, result.replicates);
  return result;
}

}  // namespace cedtest
