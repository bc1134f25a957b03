/*
 Copyright 2026 The ruinbound Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Test-only reference implementations. Built on Boost quadrature and root
// finding so that they share no numerics with the library.

#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

namespace oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Market {
  double r, mu, sigma, beta;
  double gamma() const { return 0.5 * std::pow((mu - r) / sigma, 2); }
  // Roots of gamma l^2 - (r - beta - gamma) l - r, by the textbook formula.
  double lambda(int sign) const {
    const double a = gamma();
    const double b = -(r - beta - gamma());
    const double c = -r;
    return (-b + sign * std::sqrt(b * b - 4 * a * c)) / (2 * a);
  }
};

struct Utility {
  std::function<double(double)> value;
  std::function<double(double)> marginal;
};

inline Utility power(double p) {
  return {[p](double c) { return std::pow(c, 1 - p) / (1 - p); },
          [p](double c) { return std::pow(c, -p); }};
}

inline Utility log_utility() {
  return {[](double c) { return std::log(c); }, [](double c) { return 1 / c; }};
}

inline Utility shifted(double p, double eta, double k) {
  return {[=](double c) { return (std::pow(c + eta, 1 - p) - std::pow(eta, 1 - p)) / (1 - p) - k; },
          [=](double c) { return std::pow(c + eta, -p); }};
}

/// Integral of f over [lo, hi]; hi may be infinite.
inline double integral(const std::function<double(double)>& f, double lo, double hi) {
  if (hi == lo) return 0.0;
  if (std::isinf(hi)) {
    boost::math::quadrature::exp_sinh<double> q;
    // exp_sinh integrates over [0, inf); shift to start at lo.
    return q.integrate([&](double t) { return f(lo + t); }, 0.0, kInf, 1e-14);
  }
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, lo, hi, 1e-14);
}

/// Integral of U'(theta)^(-l) over [lo, hi].
inline double kernel(const Utility& u, double l, double lo, double hi) {
  return integral([&](double t) { return std::pow(u.marginal(t), -l); }, lo, hi);
}

/// Inverse of a decreasing marginal utility by bracketing and TOMS 748.
inline double inverse_marginal(const Utility& u, double y) {
  if (u.marginal(0.0) <= y) return 0.0;
  double hi = 1.0;
  while (u.marginal(hi) > y) hi *= 2;
  double lo = hi / 2;
  while (lo > 1e-300 && u.marginal(lo) < y) lo /= 2;
  if (u.marginal(lo) < y) lo = 0.0;
  boost::uintmax_t iters = 500;
  auto res = boost::math::tools::toms748_solve([&](double c) { return u.marginal(c) - y; }, lo, hi,
                                               boost::math::tools::eps_tolerance<double>(60), iters);
  return 0.5 * (res.first + res.second);
}

/// Dual wealth and value maps written out from their definitions.
struct Dual {
  Market m;
  Utility u;
  double floor;  // consumption at bankruptcy, 0 if none
  double b;      // coefficient of y^lambda_plus

  double lp() const { return m.lambda(+1); }
  double lm() const { return m.lambda(-1); }
  double d() const { return 1 / (m.gamma() * (lp() - lm())); }

  double wealth(double y) const {
    const double c = inverse_marginal(u, y);
    return b * std::pow(y, lp()) + c / m.r -
           d() * (std::pow(y, lp()) / lp() * kernel(u, lp(), floor, c) +
                  std::pow(y, lm()) / lm() * kernel(u, lm(), c, kInf));
  }

  double value(double y) const {
    const double c = inverse_marginal(u, y);
    const double rp = 1 + lp();
    const double rm = 1 + lm();
    return lp() / rp * b * std::pow(y, rp) + u.value(c) / m.beta -
           d() * (std::pow(y, rp) / rp * kernel(u, lp(), floor, c) +
                  std::pow(y, rm) / rm * kernel(u, lm(), c, kInf));
  }
};

/// Coefficient b making the wealth map vanish at y = U'(a).
inline double wealth_coef_for_floor(const Market& m, const Utility& u, double a) {
  Dual probe{m, u, a, 0.0};
  const double ya = u.marginal(a);
  return (-a / m.r + probe.d() * std::pow(ya, probe.lm()) / probe.lm() * kernel(u, probe.lm(), a, kInf)) /
         std::pow(ya, probe.lp());
}

/// Value of the dual value map at y = U'(a) once the wealth map is pinned there.
inline double value_at_floor(const Market& m, const Utility& u, double a) {
  const Dual dual{m, u, a, wealth_coef_for_floor(m, u, a)};
  return dual.value(u.marginal(a));
}

}  // namespace oracle
