#include "cedtest/smoothing.hpp"

#include "cedtest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace cedtest {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;  // 1/sqrt(2 pi)
constexpr double kRotConstant = 1.06;

std::span<const double> row_span(const Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

void check_spec_dim(std::size_t dim, const SmoothingSpec& spec) {
  if (dim != spec.h.size()) {
    throw DimensionError("point has dimension " + std::to_string(dim) +
                         " but smoothing spec has " + std::to_string(spec.h.size()) +
                         " bandwidths");
  }
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Gaussian:
      return "gaussian";
    case KernelFamily::Epanechnikov:
      return "epanechnikov";
    case KernelFamily::Rectangular:
      return "rectangular";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(std::string_view name) {
  if (name == "gaussian") return KernelFamily::Gaussian;
  if (name == "epanechnikov") return KernelFamily::Epanechnikov;
  if (name == "rectangular") return KernelFamily::Rectangular;
  throw ConfigError("unknown kernel family '" + std::string(name) + "'");
}

double kernel_eval(double u, KernelFamily family) {
  if (!std::isfinite(u)) throw DomainError("kernel argument must be finite");
  switch (family) {
    case KernelFamily::Gaussian:
      return kInvSqrt2Pi * std::exp(-0.5 * u * u);
    case KernelFamily::Epanechnikov:
      return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
    case KernelFamily::Rectangular:
      return std::abs(u) <= 1.0 ? 0.5 : 0.0;
  }
  return 0.0;
}

double kernel_self_convolution(double u, KernelFamily family) {
  if (!std::isfinite(u)) throw DomainError("kernel argument must be finite");
  const double a = std::abs(u);
  switch (family) {
    case KernelFamily::Gaussian:
      // N(0, 2) density.
      return 0.5 * kInvSqrt2Pi * std::exp(-0.25 * u * u) * std::numbers::sqrt2;
    case KernelFamily::Epanechnikov: {
      if (a > 2.0) return 0.0;
      const double c = 2.0 - a;
      return 3.0 / 160.0 * c * c * c * (a * a + 6.0 * a + 4.0);
    }
    case KernelFamily::Rectangular:
      return a <= 2.0 ? 0.25 * (2.0 - a) : 0.0;
  }
  return 0.0;
}

BandwidthVector::BandwidthVector(std::vector<double> h) : h_(std::move(h)) {
  for (std::size_t r = 0; r < h_.size(); ++r) {
    if (!(std::isfinite(h_[r]) && h_[r] > 0.0)) {
      throw DomainError("bandwidth " + std::to_string(r) + " must be positive and finite, got " +
                        std::to_string(h_[r]));
    }
  }
}

BandwidthVector BandwidthVector::scaled(double factor) const {
  std::vector<double> out(h_);
  for (double& v : out) v *= factor;
  return BandwidthVector(std::move(out));
}

double product_kernel_eval(std::span<const double> x, const SmoothingSpec& spec) {
  check_spec_dim(x.size(), spec);
  double prod = 1.0;
  for (std::size_t r = 0; r < x.size(); ++r) {
    const double h = spec.h[r];
    prod *= kernel_eval(x[r] / h, spec.family) / h;
  }
  return prod;
}

double product_kernel_diff(std::span<const double> a, std::span<const double> b,
                           const SmoothingSpec& spec) {
  if (a.size() != b.size()) throw DimensionError("kernel arguments differ in dimension");
  check_spec_dim(a.size(), spec);
  double prod = 1.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    const double h = spec.h[r];
    prod *= kernel_eval((a[r] - b[r]) / h, spec.family) / h;
  }
  return prod;
}

BandwidthVector rot_bandwidths(const Matrix& x) {
  const auto n = x.rows();
  const auto p = x.cols();
  if (n < 2) throw InvalidArgument("rule-of-thumb bandwidth needs at least two observations");
  if (p < 1) throw DimensionError("covariate dimension must be positive");
  if (!x.allFinite()) throw DomainError("covariates contain non-finite values");

  const double rate = std::pow(static_cast<double>(n), -1.0 / (static_cast<double>(p) + 4.0));
  std::vector<double> h(static_cast<std::size_t>(p));
  for (Eigen::Index r = 0; r < p; ++r) {
    const auto col = x.col(r);
    const double mean = col.mean();
    const double ss = (col.array() - mean).square().sum();
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (!(sd > 0.0)) {
      throw DegenerateDataError("covariate column " + std::to_string(r) +
                                " is constant; bandwidth undefined");
    }
    h[static_cast<std::size_t>(r)] = kRotConstant * sd * rate;
  }
  return BandwidthVector(std::move(h));
}

double lscv_score(const Matrix& x, const BandwidthVector& h, KernelFamily family) {
  const auto n = x.rows();
  const auto p = x.cols();
  if (n < 3) throw InvalidArgument("cross-validation needs at least three observations");
  if (static_cast<std::size_t>(p) != h.size()) {
    throw DimensionError("bandwidth vector does not match covariate dimension");
  }
  const SmoothingSpec spec{family, h};

  // Pairs i != j enter both the integral term and the leave-one-out term;
  // the diagonal only enters the integral.
  double diag = 1.0;
  for (std::size_t r = 0; r < h.size(); ++r) diag *= kernel_self_convolution(0.0, family) / h[r];

  CompensatedSum conv_off;
  CompensatedSum loo;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double conv = 1.0;
      for (Eigen::Index r = 0; r < p; ++r) {
        const double hr = h[static_cast<std::size_t>(r)];
        conv *= kernel_self_convolution((x(i, r) - x(j, r)) / hr, family) / hr;
      }
      conv_off += conv;
      loo += product_kernel_diff(row_span(x, i), row_span(x, j), spec);
    }
  }
  const double nd = static_cast<double>(n);
  const double integral = (nd * diag + 2.0 * conv_off.value()) / (nd * nd);
  const double loo_mean = 2.0 * loo.value() / (nd * (nd - 1.0));
  return integral - 2.0 * loo_mean;
}

namespace detail {

std::size_t argmin_factor(std::span<const double> grid,
                          const std::function<double(double)>& score) {
  if (grid.empty()) throw ConfigError("bandwidth grid is empty");
  std::size_t best = 0;
  double best_score = score(grid[0]);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double s = score(grid[k]);
    if (s < best_score || (s == best_score && grid[k] < grid[best])) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

}  // namespace detail

BandwidthVector lscv_bandwidths(const Matrix& x, std::span<const double> grid,
                                KernelFamily family) {
  if (grid.empty()) throw ConfigError("bandwidth grid is empty");
  for (double g : grid) {
    if (!(std::isfinite(g) && g > 0.0)) throw ConfigError("bandwidth grid factors must be positive");
  }
  if (x.rows() < 3) throw InvalidArgument("cross-validation needs at least three observations");
  const BandwidthVector base = rot_bandwidths(x);
  if (grid.size() == 1) return base.scaled(grid[0]);
  const std::size_t best = detail::argmin_factor(
      grid, [&](double factor) { return lscv_score(x, base.scaled(factor), family); });
  return base.scaled(grid[best]);
}

double kde_at(std::span<const double> x, const Matrix& data, const SmoothingSpec& spec) {
  if (data.rows() < 1) throw InvalidArgument("density estimate needs at least one observation");
  if (static_cast<std::size_t>(data.cols()) != x.size()) {
    throw DimensionError("evaluation point dimension does not match data");
  }
  check_spec_dim(x.size(), spec);
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    acc += product_kernel_diff(row_span(data, i), x, spec);
  }
  return acc.value() / static_cast<double>(data.rows());
}

BandwidthVector select_bandwidths(const Matrix& x, const BandwidthRule& rule,
                                  KernelFamily family) {
  switch (rule.kind) {
    case BandwidthRule::Kind::RuleOfThumb:
      return rot_bandwidths(x);
    case BandwidthRule::Kind::Lscv:
      return lscv_bandwidths(x, rule.grid, family);
  }
  throw ConfigError("unknown bandwidth rule");
}

}  // namespace cedtest
