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

#include <limits>

namespace ruinbound {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Market and mortality constants, all per year.
struct MarketParams {
  double r = 0.0;      ///< riskless rate
  double mu = 0.0;     ///< drift of the risky asset
  double sigma = 0.0;  ///< volatility of the risky asset
  double beta = 0.0;   ///< mortality hazard rate
};

/// Roots of the two characteristic quadratics that drive every closed form.
///
/// lambda_minus < -1 < 0 < lambda_plus solve
///   gamma*l^2 - (r - beta - gamma)*l - r = 0
/// and rho_pm = 1 + lambda_pm solve
///   gamma*p^2 - (r - beta + gamma)*p - beta = 0.
struct RootSet {
  double gamma = 0.0;  ///< half the squared market price of risk
  double lambda_minus = 0.0;
  double lambda_plus = 0.0;
  double rho_minus = 0.0;
  double rho_plus = 0.0;
};

/// Returns p unchanged, or throws InvalidInput naming the first violated
/// inequality (r > 0, sigma > 0, beta > 0, mu > r, all finite).
MarketParams validate_params(const MarketParams& p);

/// Solves both quadratics. Requires validated parameters.
RootSet derive_roots(const MarketParams& p);

/// gamma*l^2 - (r - beta - gamma)*l - r evaluated at l.
double lambda_quadratic(const MarketParams& p, const RootSet& roots, double l);

/// gamma*p^2 - (r - beta + gamma)*p - beta evaluated at p.
double rho_quadratic(const MarketParams& p, const RootSet& roots, double rho);

}  // namespace ruinbound
