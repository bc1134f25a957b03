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

#pragma once

#include <functional>

namespace ruinbound {

struct QuadratureOptions {
  double rel_tol = 1e-13;
  double abs_tol = 0.0;
  int max_intervals = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  ///< sum of per-interval |K15 - G7| estimates
  int intervals = 0;
  bool converged = false;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive 7/15-point Gauss-Kronrod on a finite interval.
/// Endpoints are never sampled, so integrable endpoint singularities are fine.
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Integral over [lower, inf) for lower > 0, through the geometric tail map
/// theta = lower * exp(t / (1 - t)), t in [0, 1). Algebraic tails become
/// exponentially decaying in t, which the Kronrod rule resolves quickly.
QuadratureResult integrate_tail(const Integrand& f, double lower,
                                const QuadratureOptions& opts = {});

/// Integral over (0, upper] through theta = upper * exp(-t / (1 - t)).
QuadratureResult integrate_from_zero(const Integrand& f, double upper,
                                     const QuadratureOptions& opts = {});

}  // namespace ruinbound
