#include "cedtest/oracle.hpp"

#include "cedtest/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace cedtest::oracle {

void QuadratureSpec::validate() const {
  if (!(eps > 0.0 && eps < t_max && std::isfinite(t_max))) {
    throw ConfigError("quadrature needs 0 < eps < t_max");
  }
  if (n_nodes < 16) throw ConfigError("quadrature needs at least 16 nodes per half-line");
}

double weight_constant_cq(int q) {
  if (q < 1) throw DomainError("response dimension q must be at least 1");
  const double a = 0.5 * (q + 1.0);
  return std::pow(std::numbers::pi, a) / std::tgamma(a);
}

double distance_integral_constant(int q, double alpha) {
  if (q < 1) throw DomainError("dimension q must be at least 1");
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie strictly between 0 and 2");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * q) * std::tgamma(1.0 - 0.5 * alpha) /
         (alpha * std::pow(2.0, alpha) * std::tgamma(0.5 * (q + alpha)));
}

double line_integral(const std::function<double(double)>& f, const QuadratureSpec& quad,
                     double origin_value, double tail_coefficient) {
  quad.validate();
  const int n = quad.n_nodes + (quad.n_nodes % 2);  // Simpson needs an even count
  const double step = (quad.t_max - quad.eps) / n;
  auto half_line = [&](double sign) {
    CompensatedSum acc;
    for (int k = 0; k <= n; ++k) {
      const double t = sign * (quad.eps + k * step);
      const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
      acc += w * f(t);
    }
    return acc.value() * step / 3.0;
  };
  return half_line(-1.0) + half_line(1.0) + 2.0 * quad.eps * origin_value +
         2.0 * tail_coefficient / quad.t_max;
}

double ced_v_quadrature(std::span<const double> x, const Sample& s1, const Sample& s2,
                        const SmoothingSpec& spec1, const SmoothingSpec& spec2,
                        const QuadratureSpec& quad) {
  check_compatible(s1, s2);
  if (s1.response_dim() != 1) throw DomainError("characteristic-function oracle supports q = 1 only");
  quad.validate();

  auto normalized_weights = [&](const Sample& s, const SmoothingSpec& spec, const char* label) {
    std::vector<double> w(s.size());
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      std::span<const double> xi(s.x.data() + r * s.x.cols(), static_cast<std::size_t>(s.x.cols()));
      w[i] = product_kernel_diff(xi, x, spec);
      total += w[i];
    }
    if (!(total > 0.0)) {
      throw EvaluationPointError(std::string("estimated covariate density of ") + label +
                                 " is zero at the evaluation point");
    }
    for (double& v : w) v /= total;
    return w;
  };
  const std::vector<double> w1 = normalized_weights(s1, spec1, "sample 1");
  const std::vector<double> w2 = normalized_weights(s2, spec2, "sample 2");

  auto cf = [](const std::vector<double>& w, const Matrix& y, double t) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double arg = t * y(static_cast<Eigen::Index>(i), 0);
      re += w[i] * std::cos(arg);
      im += w[i] * std::sin(arg);
    }
    return std::pair{re, im};
  };
  const double c1 = weight_constant_cq(1);
  auto integrand = [&](double t) {
    const auto [re1, im1] = cf(w1, s1.y, t);
    const auto [re2, im2] = cf(w2, s2.y, t);
    const double dr = re1 - re2;
    const double di = im1 - im2;
    return (dr * dr + di * di) / (c1 * t * t);
  };

  // Near 0, |phi1 - phi2|^2 ~ t^2 (sum_a s_a y_a)^2 with signed weights s.
  // For large t the squared modulus oscillates around sum over distinct
  // response values of (net signed weight)^2.
  std::vector<std::pair<double, double>> signed_atoms;
  double first_moment = 0.0;
  for (std::size_t i = 0; i < w1.size(); ++i) {
    const double y = s1.y(static_cast<Eigen::Index>(i), 0);
    signed_atoms.emplace_back(y, w1[i]);
    first_moment += w1[i] * y;
  }
  for (std::size_t i = 0; i < w2.size(); ++i) {
    const double y = s2.y(static_cast<Eigen::Index>(i), 0);
    signed_atoms.emplace_back(y, -w2[i]);
    first_moment -= w2[i] * y;
  }
  std::sort(signed_atoms.begin(), signed_atoms.end());
  double mean_square = 0.0;
  for (std::size_t k = 0; k < signed_atoms.size();) {
    double mass = 0.0;
    std::size_t e = k;
    while (e < signed_atoms.size() && signed_atoms[e].first == signed_atoms[k].first) {
      mass += signed_atoms[e].second;
      ++e;
    }
    mean_square += mass * mass;
    k = e;
  }

  return line_integral(integrand, quad, first_moment * first_moment / c1, mean_square / c1);
}

}  // namespace cedtest::oracle
