#pragma once

#include "cedtest/types.hpp"

#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace cedtest {

// Second-order symmetric kernels on the real line. Each integrates to one.
enum class KernelFamily { Gaussian, Epanechnikov, Rectangular };

std::string_view to_string(KernelFamily family);
KernelFamily kernel_family_from_string(std::string_view name);

// K(u). Throws DomainError for non-finite u.
double kernel_eval(double u, KernelFamily family);

// (K * K)(u), the self-convolution used by the cross-validation criterion.
double kernel_self_convolution(double u, KernelFamily family);

// Per-coordinate bandwidths; every entry is strictly positive and finite.
class BandwidthVector {
 public:
  BandwidthVector() = default;
  explicit BandwidthVector(std::vector<double> h);

  std::size_t size() const { return h_.size(); }
  double operator[](std::size_t r) const { return h_[r]; }
  const std::vector<double>& values() const { return h_; }

  BandwidthVector scaled(double factor) const;

  friend bool operator==(const BandwidthVector&, const BandwidthVector&) = default;

 private:
  std::vector<double> h_;
};

// Defines the product kernel K_h(x) = prod_r K(x_r / h_r) / h_r.
struct SmoothingSpec {
  KernelFamily family = KernelFamily::Gaussian;
  BandwidthVector h;
};

double product_kernel_eval(std::span<const double> x, const SmoothingSpec& spec);

// Product kernel of the difference a - b, without materializing it.
double product_kernel_diff(std::span<const double> a, std::span<const double> b,
                           const SmoothingSpec& spec);

// Normal-reference rule: h_r = 1.06 * sd_r * n^(-1/(p+4)) with the sample
// standard deviation (n - 1 denominator).
BandwidthVector rot_bandwidths(const Matrix& x);

// Least-squares cross-validation score for the product-kernel density
// estimate with bandwidth h: int fhat^2 - (2/n) sum_i fhat_{-i}(X_i).
double lscv_score(const Matrix& x, const BandwidthVector& h, KernelFamily family);

// Minimizes lscv_score over h = factor * rot_bandwidths(x), factor in grid.
// Ties go to the smallest factor.
BandwidthVector lscv_bandwidths(const Matrix& x, std::span<const double> grid,
                                KernelFamily family = KernelFamily::Gaussian);

// fhat(x) = (1/n) sum_i K_h(X_i - x).
double kde_at(std::span<const double> x, const Matrix& data, const SmoothingSpec& spec);

// How a bandwidth vector is derived from covariate data.
struct BandwidthRule {
  enum class Kind { RuleOfThumb, Lscv };
  Kind kind = Kind::RuleOfThumb;
  std::vector<double> grid;  // multiplicative factors, used by Lscv only

  static BandwidthRule rule_of_thumb() { return {}; }
  static BandwidthRule lscv(std::vector<double> factors) {
    return {Kind::Lscv, std::move(factors)};
  }
};

BandwidthVector select_bandwidths(const Matrix& x, const BandwidthRule& rule,
                                  KernelFamily family);

namespace detail {

// Index of the smallest factor attaining the minimal score.
std::size_t argmin_factor(std::span<const double> grid,
                          const std::function<double(double)>& score);

}  // namespace detail

}  // namespace cedtest
