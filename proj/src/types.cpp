#include "cedtest/types.hpp"

#include "cedtest/errors.hpp"

#include <string>

namespace cedtest {

Sample::Sample(Matrix responses, Matrix covariates)
    : y(std::move(responses)), x(std::move(covariates)) {
  if (y.rows() != x.rows()) {
    throw DimensionError("sample has " + std::to_string(y.rows()) + " responses but " +
                         std::to_string(x.rows()) + " covariate rows");
  }
  if (y.rows() < 1) throw InvalidArgument("sample must contain at least one observation");
  if (y.cols() < 1 || x.cols() < 1) {
    throw DimensionError("response and covariate dimensions must be positive");
  }
  if (!y.allFinite() || !x.allFinite()) throw DomainError("sample contains non-finite values");
}

void check_compatible(const Sample& s1, const Sample& s2) {
  if (s1.y.rows() != s1.x.rows() || s2.y.rows() != s2.x.rows()) {
    throw DimensionError("response and covariate row counts differ");
  }
  if (s1.response_dim() != s2.response_dim()) {
    throw DimensionError("samples have different response dimensions (" +
                         std::to_string(s1.response_dim()) + " vs " +
                         std::to_string(s2.response_dim()) + ")");
  }
  if (s1.covariate_dim() != s2.covariate_dim()) {
    throw DimensionError("samples have different covariate dimensions (" +
                         std::to_string(s1.covariate_dim()) + " vs " +
                         std::to_string(s2.covariate_dim()) + ")");
  }
}

Matrix stack_rows(const Matrix& top, const Matrix& bottom) {
  if (top.cols() != bottom.cols()) throw DimensionError("cannot stack matrices of different widths");
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

}  // namespace cedtest
