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

#include "ruinbound/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace ruinbound {
namespace {

constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrod = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kGauss = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment gauss_kronrod(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = kKronrod[7] * fc;
  double gauss = kGauss[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kNodes[i];
    const double pair = f(center - dx) + f(center + dx);
    kronrod += kKronrod[i] * pair;
    if (i % 2 == 1) gauss += kGauss[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& opts) {
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> heap;
  Segment first = gauss_kronrod(f, a, b);
  double total = first.value;
  double error = first.error;
  heap.push(first);
  int count = 1;
  auto done = [&] {
    return error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
  };
  while (!done() && count < opts.max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push(worst);
      break;  // interval no longer divisible in double precision
    }
    Segment left = gauss_kronrod(f, worst.a, mid);
    Segment right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum from the leaves to shed the running-update rounding.
  total = 0.0;
  error = 0.0;
  std::vector<Segment> leaves;
  leaves.reserve(heap.size());
  while (!heap.empty()) {
    leaves.push_back(heap.top());
    heap.pop();
  }
  for (auto it = leaves.rbegin(); it != leaves.rend(); ++it) {
    total += it->value;
    error += it->error;
  }
  out.value = total;
  out.error = error;
  out.intervals = count;
  out.converged = std::isfinite(total) && done();
  return out;
}

QuadratureResult integrate_tail(const Integrand& f, double lower,
                                const QuadratureOptions& opts) {
  auto mapped = [&](double t) {
    const double s = t / (1.0 - t);
    if (s > 700.0) return 0.0;
    const double theta = lower * std::exp(s);
    const double jac = theta / ((1.0 - t) * (1.0 - t));
    const double v = f(theta) * jac;
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

QuadratureResult integrate_from_zero(const Integrand& f, double upper,
                                     const QuadratureOptions& opts) {
  auto mapped = [&](double t) {
    const double s = t / (1.0 - t);
    if (s > 700.0) return 0.0;
    const double theta = upper * std::exp(-s);
    const double jac = theta / ((1.0 - t) * (1.0 - t));
    const double v = f(theta) * jac;
    return std::isfinite(v) ? v : 0.0;
  };
  return integrate(mapped, 0.0, 1.0, opts);
}

}  // namespace ruinbound
