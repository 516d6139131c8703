#pragma once

#include "cedtest/smoothing.hpp"
#include "cedtest/types.hpp"

#include <span>

namespace cedtest {

// Response-space discrepancy d(y, y'). The Euclidean norm gives the
// conditional energy distance; the negated Gaussian RKHS kernel
// -exp(-|y - y'|^2 / gamma^2) plugged into the same formulas gives the
// kernel-based measure M(x).
class Dissimilarity {
 public:
  enum class Kind { Euclidean, NegGaussianRkhs, Zero };

  static Dissimilarity euclidean() { return Dissimilarity(Kind::Euclidean, 0.0); }
  static Dissimilarity neg_gaussian_rkhs(double gamma);
  // d == 0 everywhere; only useful for exercising the estimators.
  static Dissimilarity zero() { return Dissimilarity(Kind::Zero, 0.0); }

  Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }

  double operator()(std::span<const double> a, std::span<const double> b) const;

  friend bool operator==(const Dissimilarity&, const Dissimilarity&) = default;

 private:
  Dissimilarity(Kind kind, double gamma) : kind_(kind), gamma_(gamma) {}

  Kind kind_;
  double gamma_;
};

double dissimilarity_eval(std::span<const double> y, std::span<const double> y2,
                          const Dissimilarity& d);

// n_a x n_b matrix of d(a_i, b_j).
Matrix dissimilarity_matrix(const Matrix& a, const Matrix& b, const Dissimilarity& d);

// Median of all pairwise Euclidean distances between distinct rows
// (average of the two central values for an even count).
double median_heuristic(const Matrix& pooled_responses);

// V-statistic estimate of the squared pointwise discrepancy at x.
double ced_v_at(std::span<const double> x, const Sample& s1, const Sample& s2,
                const SmoothingSpec& spec1, const SmoothingSpec& spec2, const Dissimilarity& d);

// U-statistic estimate: average of the degree-(2,2) kernel over i<j, l<m.
// Needs at least two observations per sample.
double ced_u_at(std::span<const double> x, const Sample& s1, const Sample& s2,
                const SmoothingSpec& spec1, const SmoothingSpec& spec2, const Dissimilarity& d);

namespace detail {

// Total order on (sample, spec) pairs. Two-sample estimators that are
// symmetric in the groups evaluate in this canonical order so that swapping
// the groups reproduces the result bit for bit.
bool group_less(const Sample& a, const SmoothingSpec& spec_a, const Sample& b,
                const SmoothingSpec& spec_b);

}  // namespace detail

}  // namespace cedtest
