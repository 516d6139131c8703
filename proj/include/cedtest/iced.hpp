#pragma once

#include "cedtest/measures.hpp"
#include "cedtest/smoothing.hpp"
#include "cedtest/types.hpp"

#include <cstddef>
#include <span>

namespace cedtest {

enum class IcedEvaluator { NaiveQuartic, FastCubic };

struct IcedValue {
  double value = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  IcedEvaluator evaluator = IcedEvaluator::FastCubic;
};

// One observation Z = (Y, X) viewed in place.
struct Observation {
  std::span<const double> y;
  std::span<const double> x;
};

Observation observation(const Sample& s, std::size_t row);

// The degree-(2,2) kernel psi(Z1_i, Z1_j; Z2_l, Z2_m) of the integrated
// statistic: four cross-response groups weighted 1/4 and two within-response
// groups weighted -1/2.
double psi_eval(const Observation& z1a, const Observation& z1b, const Observation& z2a,
                const Observation& z2b, const SmoothingSpec& spec1, const SmoothingSpec& spec2,
                const Dissimilarity& d);

// Reference evaluator: average of psi over all i<j, l<m. O(n1^2 n2^2).
IcedValue iced_naive(const Sample& s1, const Sample& s2, const SmoothingSpec& spec1,
                     const SmoothingSpec& spec2, const Dissimilarity& d);

// The statistic is linear in the three response dissimilarity matrices:
//
//   I = sum_{i,l} D12(i,l) Wx(i,l) + sum_{i!=j} D11(i,j) W11(i,j)
//       + sum_{l!=m} D22(l,m) W22(l,m)
//
// where the weight matrices depend on the covariates and bandwidths only.
// Building them costs O(n1 n2 (n1 + n2)); each evaluation afterwards is a
// weighted sum over the dissimilarities, which is what makes the local
// bootstrap (responses redrawn, covariates fixed) cheap.
class IcedWeights {
 public:
  IcedWeights(const Matrix& x1, const Matrix& x2, const SmoothingSpec& spec1,
              const SmoothingSpec& spec2);

  std::size_t n1() const { return static_cast<std::size_t>(cross_.rows()); }
  std::size_t n2() const { return static_cast<std::size_t>(cross_.cols()); }

  const Matrix& cross() const { return cross_; }
  const Matrix& within1() const { return within1_; }
  const Matrix& within2() const { return within2_; }

  double evaluate(const Matrix& y1, const Matrix& y2, const Dissimilarity& d) const;

  // Responses given as row indices into a pooled set whose full
  // dissimilarity matrix is supplied.
  double evaluate_indexed(const Matrix& pooled_dissimilarity, std::span<const std::size_t> rows1,
                          std::span<const std::size_t> rows2) const;

 private:
  template <typename D12, typename D11, typename D22>
  double contract(D12&& d12, D11&& d11, D22&& d22) const;

  Matrix cross_;    // n1 x n2, already scaled by the normalizing constant
  Matrix within1_;  // n1 x n1, zero diagonal
  Matrix within2_;  // n2 x n2, zero diagonal
};

// Same value as iced_naive (up to rounding) in O(n1 n2 (n1 + n2)).
IcedValue iced_fast(const Sample& s1, const Sample& s2, const SmoothingSpec& spec1,
                    const SmoothingSpec& spec2, const Dissimilarity& d);

}  // namespace cedtest
