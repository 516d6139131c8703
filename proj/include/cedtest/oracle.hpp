#pragma once

#include "cedtest/smoothing.hpp"
#include "cedtest/types.hpp"

#include <functional>
#include <span>

namespace cedtest::oracle {

// Truncated, origin-excluded integration domain [-t_max, -eps] u [eps, t_max]
// with n_nodes Simpson intervals per half-line.
struct QuadratureSpec {
  double t_max = 200.0;
  int n_nodes = 20000;
  double eps = 1e-6;

  void validate() const;
};

// c_q = pi^((q+1)/2) / Gamma((q+1)/2), the energy-distance weight constant.
double weight_constant_cq(int q);

// C(q, alpha) with int (1 - cos<t,y>) / |t|^(q+alpha) dt = C(q, alpha) |y|^alpha.
double distance_integral_constant(int q, double alpha);

// Integral of an even-or-not function f over the symmetric truncated
// domain, plus the analytic contributions of the two excluded pieces:
//   origin:  2 eps * origin_value          (f ~ origin_value near 0)
//   tails:   2 tail_coefficient / t_max    (f ~ tail_coefficient / t^2)
double line_integral(const std::function<double(double)>& f, const QuadratureSpec& quad,
                     double origin_value = 0.0, double tail_coefficient = 0.0);

// CED^2_v(x) for scalar responses, computed from the kernel-weighted
// empirical conditional characteristic functions:
//   (1/c_1) int |phi1(t) - phi2(t)|^2 / t^2 dt.
double ced_v_quadrature(std::span<const double> x, const Sample& s1, const Sample& s2,
                        const SmoothingSpec& spec1, const SmoothingSpec& spec2,
                        const QuadratureSpec& quad = {});

}  // namespace cedtest::oracle
