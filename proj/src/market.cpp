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

#include "ruinbound/market.hpp"

#include <cmath>

#include "ruinbound/errors.hpp"

namespace ruinbound {

MarketParams validate_params(const MarketParams& p) {
  if (!std::isfinite(p.r) || !std::isfinite(p.mu) || !std::isfinite(p.sigma) ||
      !std::isfinite(p.beta)) {
    throw InvalidInput("market parameters must be finite");
  }
  if (p.r <= 0.0) throw InvalidInput("r must be positive");
  if (p.sigma <= 0.0) throw InvalidInput("sigma must be positive");
  if (p.beta <= 0.0) throw InvalidInput("beta must be positive");
  if (p.mu <= p.r) throw InvalidInput("mu must exceed r");
  return p;
}

RootSet derive_roots(const MarketParams& p) {
  RootSet out;
  const double sharpe = (p.mu - p.r) / p.sigma;
  out.gamma = 0.5 * sharpe * sharpe;

  // a*l^2 + b*l + c with a > 0 and c < 0, so the discriminant is positive.
  const double a = out.gamma;
  const double b = -(p.r - p.beta - out.gamma);
  const double c = -p.r;
  const double disc = std::sqrt(b * b - 4.0 * a * c);
  const double q = -0.5 * (b + std::copysign(disc, b));
  const double first = q / a;
  const double second = c / q;
  out.lambda_plus = first > second ? first : second;
  out.lambda_minus = first > second ? second : first;
  out.rho_plus = 1.0 + out.lambda_plus;
  out.rho_minus = 1.0 + out.lambda_minus;
  return out;
}

double lambda_quadratic(const MarketParams& p, const RootSet& roots, double l) {
  return roots.gamma * l * l - (p.r - p.beta - roots.gamma) * l - p.r;
}

double rho_quadratic(const MarketParams& p, const RootSet& roots, double rho) {
  return roots.gamma * rho * rho - (p.r - p.beta + roots.gamma) * rho - p.beta;
}

}  // namespace ruinbound
