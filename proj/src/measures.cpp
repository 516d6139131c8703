#include "cedtest/measures.hpp"

#include "cedtest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace cedtest {

namespace {

std::span<const double> row_span(const Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

// Kernel weights K(X_i - x) for every row of a sample.
std::vector<double> local_weights(std::span<const double> x, const Matrix& covariates,
                                  const SmoothingSpec& spec) {
  if (static_cast<std::size_t>(covariates.cols()) != x.size()) {
    throw DimensionError("evaluation point dimension does not match covariates");
  }
  std::vector<double> w(static_cast<std::size_t>(covariates.rows()));
  for (Eigen::Index i = 0; i < covariates.rows(); ++i) {
    w[static_cast<std::size_t>(i)] = product_kernel_diff(row_span(covariates, i), x, spec);
  }
  return w;
}

double total(const std::vector<double>& w) {
  CompensatedSum acc;
  for (double v : w) acc += v;
  return acc.value();
}

// sum_{i,j} d(a_i, b_j) wa_i wb_j, optionally skipping i == j.
double weighted_pair_sum(const Matrix& a, const std::vector<double>& wa, const Matrix& b,
                         const std::vector<double>& wb, const Dissimilarity& d,
                         bool skip_diagonal) {
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double wi = wa[static_cast<std::size_t>(i)];
    if (wi == 0.0) continue;
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      if (skip_diagonal && i == j) continue;
      acc += d(row_span(a, i), row_span(b, j)) * wi * wb[static_cast<std::size_t>(j)];
    }
  }
  return acc.value();
}

struct LocalSums {
  double w1 = 0.0;  // n1 * fhat1(x)
  double w2 = 0.0;  // n2 * fhat2(x)
  double cross = 0.0;
  double within1 = 0.0;
  double within2 = 0.0;
};

LocalSums local_sums(std::span<const double> x, const Sample& s1, const Sample& s2,
                     const SmoothingSpec& spec1, const SmoothingSpec& spec2,
                     const Dissimilarity& d, bool skip_diagonal) {
  check_compatible(s1, s2);
  const auto wa = local_weights(x, s1.x, spec1);
  const auto wb = local_weights(x, s2.x, spec2);
  LocalSums out;
  out.w1 = total(wa);
  out.w2 = total(wb);
  if (!(out.w1 > 0.0)) {
    throw EvaluationPointError("estimated covariate density of sample 1 is zero at the evaluation point");
  }
  if (!(out.w2 > 0.0)) {
    throw EvaluationPointError("estimated covariate density of sample 2 is zero at the evaluation point");
  }
  out.cross = weighted_pair_sum(s1.y, wa, s2.y, wb, d, false);
  out.within1 = weighted_pair_sum(s1.y, wa, s1.y, wa, d, skip_diagonal);
  out.within2 = weighted_pair_sum(s2.y, wb, s2.y, wb, d, skip_diagonal);
  return out;
}

}  // namespace

namespace detail {

namespace {

// -1, 0, 1 three-way comparison of two double ranges, shorter first.
int compare_ranges(const double* a, std::size_t na, const double* b, std::size_t nb) {
  if (na != nb) return na < nb ? -1 : 1;
  for (std::size_t k = 0; k < na; ++k) {
    if (a[k] < b[k]) return -1;
    if (b[k] < a[k]) return 1;
  }
  return 0;
}

}  // namespace

bool group_less(const Sample& a, const SmoothingSpec& spec_a, const Sample& b,
                const SmoothingSpec& spec_b) {
  auto cmp_matrix = [](const Matrix& u, const Matrix& v) {
    if (u.cols() != v.cols()) return u.cols() < v.cols() ? -1 : 1;
    return compare_ranges(u.data(), static_cast<std::size_t>(u.size()), v.data(),
                          static_cast<std::size_t>(v.size()));
  };
  if (int c = cmp_matrix(a.y, b.y); c != 0) return c < 0;
  if (int c = cmp_matrix(a.x, b.x); c != 0) return c < 0;
  if (spec_a.family != spec_b.family) return spec_a.family < spec_b.family;
  return compare_ranges(spec_a.h.values().data(), spec_a.h.size(), spec_b.h.values().data(),
                        spec_b.h.size()) < 0;
}

}  // namespace detail

Dissimilarity Dissimilarity::neg_gaussian_rkhs(double gamma) {
  if (!(std::isfinite(gamma) && gamma > 0.0)) {
    throw DomainError("RKHS kernel scale must be positive and finite");
  }
  return Dissimilarity(Kind::NegGaussianRkhs, gamma);
}

double Dissimilarity::operator()(std::span<const double> a, std::span<const double> b) const {
  switch (kind_) {
    case Kind::Euclidean:
      return std::sqrt(squared_distance(a, b));
    case Kind::NegGaussianRkhs:
      return -std::exp(-squared_distance(a, b) / (gamma_ * gamma_));
    case Kind::Zero:
      return 0.0;
  }
  return 0.0;
}

double dissimilarity_eval(std::span<const double> y, std::span<const double> y2,
                          const Dissimilarity& d) {
  if (y.size() != y2.size()) throw DimensionError("responses differ in dimension");
  return d(y, y2);
}

Matrix dissimilarity_matrix(const Matrix& a, const Matrix& b, const Dissimilarity& d) {
  if (a.cols() != b.cols()) throw DimensionError("responses differ in dimension");
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) out(i, j) = d(row_span(a, i), row_span(b, j));
  }
  return out;
}

double median_heuristic(const Matrix& pooled) {
  const auto m = pooled.rows();
  if (m < 2) throw InvalidArgument("median heuristic needs at least two responses");
  std::vector<double> dist;
  dist.reserve(static_cast<std::size_t>(m * (m - 1) / 2));
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      dist.push_back(std::sqrt(squared_distance(row_span(pooled, i), row_span(pooled, j))));
    }
  }
  std::sort(dist.begin(), dist.end());
  const std::size_t k = dist.size();
  const double med = (k % 2 == 1) ? dist[k / 2] : 0.5 * (dist[k / 2 - 1] + dist[k / 2]);
  if (!(med > 0.0)) {
    if (dist.back() == 0.0) throw DegenerateDataError("all pooled responses are identical");
    throw DegenerateDataError("median pairwise response distance is zero");
  }
  return med;
}

double ced_v_at(std::span<const double> x, const Sample& s1, const Sample& s2,
                const SmoothingSpec& spec1, const SmoothingSpec& spec2, const Dissimilarity& d) {
  if (detail::group_less(s2, spec2, s1, spec1)) return ced_v_at(x, s2, s1, spec2, spec1, d);
  const LocalSums s = local_sums(x, s1, s2, spec1, spec2, d, false);
  return 2.0 * (s.cross / (s.w1 * s.w2)) - s.within1 / (s.w1 * s.w1) -
         s.within2 / (s.w2 * s.w2);
}

double ced_u_at(std::span<const double> x, const Sample& s1, const Sample& s2,
                const SmoothingSpec& spec1, const SmoothingSpec& spec2, const Dissimilarity& d) {
  if (s1.size() < 2 || s2.size() < 2) {
    throw InvalidArgument("U-statistic estimate needs at least two observations per sample");
  }
  if (detail::group_less(s2, spec2, s1, spec1)) return ced_u_at(x, s2, s1, spec2, spec1, d);
  const LocalSums s = local_sums(x, s1, s2, spec1, spec2, d, true);
  const double n1 = static_cast<double>(s1.size());
  const double n2 = static_cast<double>(s2.size());
  return 2.0 * (s.cross / (s.w1 * s.w2)) - s.within1 * (n1 / (n1 - 1.0)) / (s.w1 * s.w1) -
         s.within2 * (n2 / (n2 - 1.0)) / (s.w2 * s.w2);
}

}  // namespace cedtest
