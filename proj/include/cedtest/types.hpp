#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>

namespace cedtest {

// Observations are stored one per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

// One group's paired observations (Y_i, X_i), i = 1..n.
struct Sample {
  Matrix y;  // n x q responses
  Matrix x;  // n x p covariates

  Sample() = default;
  Sample(Matrix responses, Matrix covariates);

  std::size_t size() const { return static_cast<std::size_t>(y.rows()); }
  std::size_t response_dim() const { return static_cast<std::size_t>(y.cols()); }
  std::size_t covariate_dim() const { return static_cast<std::size_t>(x.cols()); }
};

// Throws unless both samples are individually valid and share p and q.
void check_compatible(const Sample& s1, const Sample& s2);

// Row-concatenation of two matrices with equal column counts.
Matrix stack_rows(const Matrix& top, const Matrix& bottom);

// Neumaier-compensated accumulator. Used wherever the result must not
// depend on a rearrangement of the summands beyond rounding.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) {
    add(v);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace cedtest
