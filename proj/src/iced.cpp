#include "cedtest/iced.hpp"

#include "cedtest/errors.hpp"

#include <string>

namespace cedtest {

namespace {

std::span<const double> row_span(const Matrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

void check_sizes(const Sample& s1, const Sample& s2) {
  check_compatible(s1, s2);
  if (s1.size() < 2 || s2.size() < 2) {
    throw InvalidArgument("integrated statistic needs at least two observations per sample (got " +
                          std::to_string(s1.size()) + " and " + std::to_string(s2.size()) + ")");
  }
}

// Kernel matrix K(a_i - b_j).
Matrix kernel_matrix(const Matrix& a, const Matrix& b, const SmoothingSpec& spec) {
  Matrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      out(i, j) = product_kernel_diff(row_span(a, i), row_span(b, j), spec);
    }
  }
  return out;
}

}  // namespace

Observation observation(const Sample& s, std::size_t row) {
  if (row >= s.size()) throw InvalidArgument("observation index out of range");
  const auto r = static_cast<Eigen::Index>(row);
  return {row_span(s.y, r), row_span(s.x, r)};
}

double psi_eval(const Observation& zi, const Observation& zj, const Observation& zl,
                const Observation& zm, const SmoothingSpec& spec1, const SmoothingSpec& spec2,
                const Dissimilarity& d) {
  if (zi.y.size() != zj.y.size() || zi.y.size() != zl.y.size() || zi.y.size() != zm.y.size()) {
    throw DimensionError("responses differ in dimension");
  }
  auto k1 = [&](const Observation& a, const Observation& b) {
    return product_kernel_diff(a.x, b.x, spec1);
  };
  auto k2 = [&](const Observation& a, const Observation& b) {
    return product_kernel_diff(a.x, b.x, spec2);
  };

  // Localized at the sample-2 point m, then l; at the sample-1 point j, then i.
  const double at_m = k1(zi, zm) * k1(zj, zm) * k2(zl, zm);
  const double at_l = k1(zi, zl) * k1(zj, zl) * k2(zm, zl);
  const double at_j = k2(zl, zj) * k2(zm, zj) * k1(zi, zj);
  const double at_i = k2(zl, zi) * k2(zm, zi) * k1(zj, zi);

  const double dil = d(zi.y, zl.y);
  const double dim = d(zi.y, zm.y);
  const double djl = d(zj.y, zl.y);
  const double djm = d(zj.y, zm.y);

  return 0.25 * (dil + djl) * at_m + 0.25 * (dim + djm) * at_l + 0.25 * (dil + dim) * at_j +
         0.25 * (djl + djm) * at_i - 0.5 * d(zi.y, zj.y) * (at_l + at_m) -
         0.5 * d(zl.y, zm.y) * (at_i + at_j);
}

IcedValue iced_naive(const Sample& s1, const Sample& s2, const SmoothingSpec& spec1,
                     const SmoothingSpec& spec2, const Dissimilarity& d) {
  check_sizes(s1, s2);
  if (detail::group_less(s2, spec2, s1, spec1)) {
    IcedValue swapped = iced_naive(s2, s1, spec2, spec1, d);
    std::swap(swapped.n1, swapped.n2);
    return swapped;
  }
  const std::size_t n1 = s1.size();
  const std::size_t n2 = s2.size();
  CompensatedSum acc;
  for (std::size_t i = 0; i < n1; ++i) {
    const Observation zi = observation(s1, i);
    for (std::size_t j = i + 1; j < n1; ++j) {
      const Observation zj = observation(s1, j);
      for (std::size_t l = 0; l < n2; ++l) {
        const Observation zl = observation(s2, l);
        for (std::size_t m = l + 1; m < n2; ++m) {
          acc += psi_eval(zi, zj, zl, observation(s2, m), spec1, spec2, d);
        }
      }
    }
  }
  const double pairs1 = 0.5 * static_cast<double>(n1) * static_cast<double>(n1 - 1);
  const double pairs2 = 0.5 * static_cast<double>(n2) * static_cast<double>(n2 - 1);
  return {acc.value() / (pairs1 * pairs2), n1, n2, IcedEvaluator::NaiveQuartic};
}

IcedWeights::IcedWeights(const Matrix& x1, const Matrix& x2, const SmoothingSpec& spec1,
                         const SmoothingSpec& spec2) {
  if (x1.cols() != x2.cols()) throw DimensionError("covariate dimensions differ");
  const Eigen::Index n1 = x1.rows();
  const Eigen::Index n2 = x2.rows();
  if (n1 < 2 || n2 < 2) {
    throw InvalidArgument("integrated statistic needs at least two observations per sample");
  }

  // c1(i,m) = K1(X1_i - X2_m), c2(l,j) = K2(X2_l - X1_j); a1, a2 are the
  // within-sample kernel matrices with the diagonal removed.
  const Matrix c1 = kernel_matrix(x1, x2, spec1);
  const Matrix c2 = kernel_matrix(x2, x1, spec2);
  Matrix a1 = kernel_matrix(x1, x1, spec1);
  Matrix a2 = kernel_matrix(x2, x2, spec2);
  a1.diagonal().setZero();
  a2.diagonal().setZero();

  const Eigen::RowVectorXd col1 = c1.colwise().sum();  // sum_i c1(i,m)
  const Eigen::RowVectorXd col2 = c2.colwise().sum();  // sum_l c2(l,j)
  const Eigen::VectorXd deg1 = a1.colwise().sum().transpose();
  const Eigen::VectorXd deg2 = a2.colwise().sum().transpose();

  // e1(i,m) = c1(i,m) * sum_{j != i} c1(j,m); e2 likewise for sample 2.
  Matrix e1(n1, n2);
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index m = 0; m < n2; ++m) e1(i, m) = c1(i, m) * (col1(m) - c1(i, m));
  }
  Matrix e2(n2, n1);
  for (Eigen::Index l = 0; l < n2; ++l) {
    for (Eigen::Index j = 0; j < n1; ++j) e2(l, j) = c2(l, j) * (col2(j) - c2(l, j));
  }

  // Over ordered index pairs the psi sum is four times the i<j, l<m sum.
  const double pairs1 = 0.5 * static_cast<double>(n1) * static_cast<double>(n1 - 1);
  const double pairs2 = 0.5 * static_cast<double>(n2) * static_cast<double>(n2 - 1);
  const double norm = 1.0 / (4.0 * pairs1 * pairs2);

  cross_ = norm * (e1 * a2.transpose() + a1 * e2.transpose());
  within1_ = -norm * (c1 * deg2.asDiagonal() * c1.transpose());
  within2_ = -norm * (c2 * deg1.asDiagonal() * c2.transpose());
  within1_.diagonal().setZero();
  within2_.diagonal().setZero();
}

template <typename D12, typename D11, typename D22>
double IcedWeights::contract(D12&& d12, D11&& d11, D22&& d22) const {
  const Eigen::Index n1 = cross_.rows();
  const Eigen::Index n2 = cross_.cols();
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index l = 0; l < n2; ++l) acc += cross_(i, l) * d12(i, l);
  }
  for (Eigen::Index i = 0; i < n1; ++i) {
    for (Eigen::Index j = i + 1; j < n1; ++j) acc += 2.0 * within1_(i, j) * d11(i, j);
  }
  for (Eigen::Index l = 0; l < n2; ++l) {
    for (Eigen::Index m = l + 1; m < n2; ++m) acc += 2.0 * within2_(l, m) * d22(l, m);
  }
  return acc.value();
}

double IcedWeights::evaluate(const Matrix& y1, const Matrix& y2, const Dissimilarity& d) const {
  if (y1.rows() != cross_.rows() || y2.rows() != cross_.cols()) {
    throw DimensionError("response counts do not match the weight matrices");
  }
  if (y1.cols() != y2.cols()) throw DimensionError("responses differ in dimension");
  return contract([&](Eigen::Index i, Eigen::Index l) { return d(row_span(y1, i), row_span(y2, l)); },
                  [&](Eigen::Index i, Eigen::Index j) { return d(row_span(y1, i), row_span(y1, j)); },
                  [&](Eigen::Index l, Eigen::Index m) { return d(row_span(y2, l), row_span(y2, m)); });
}

double IcedWeights::evaluate_indexed(const Matrix& dp, std::span<const std::size_t> rows1,
                                     std::span<const std::size_t> rows2) const {
  if (rows1.size() != n1() || rows2.size() != n2()) {
    throw DimensionError("index counts do not match the weight matrices");
  }
  if (dp.rows() != dp.cols()) throw DimensionError("pooled dissimilarity matrix must be square");
  const auto pooled = static_cast<std::size_t>(dp.rows());
  for (std::size_t r : rows1) {
    if (r >= pooled) throw InvalidArgument("pooled row index out of range");
  }
  for (std::size_t r : rows2) {
    if (r >= pooled) throw InvalidArgument("pooled row index out of range");
  }
  auto at = [&](std::size_t a, std::size_t b) {
    return dp(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  };
  return contract(
      [&](Eigen::Index i, Eigen::Index l) { return at(rows1[i], rows2[l]); },
      [&](Eigen::Index i, Eigen::Index j) { return at(rows1[i], rows1[j]); },
      [&](Eigen::Index l, Eigen::Index m) { return at(rows2[l], rows2[m]); });
}

IcedValue iced_fast(const Sample& s1, const Sample& s2, const SmoothingSpec& spec1,
                    const SmoothingSpec& spec2, const Dissimilarity& d) {
  check_sizes(s1, s2);
  if (detail::group_less(s2, spec2, s1, spec1)) {
    IcedValue swapped = iced_fast(s2, s1, spec2, spec1, d);
    std::swap(swapped.n1, swapped.n2);
    return swapped;
  }
  const IcedWeights weights(s1.x, s2.x, spec1, spec2);
  return {weights.evaluate(s1.y, s2.y, d), s1.size(), s2.size(), IcedEvaluator::FastCubic};
}

}  // namespace cedtest
