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

#include "ruinbound/ruin.hpp"

#include <cmath>

#include "ruinbound/errors.hpp"

namespace ruinbound {

double psi_hat(double y, double y_bar, double rho_plus) {
  if (!(y >= 0.0)) throw InvalidInput("psi_hat requires y >= 0");
  if (std::isinf(y_bar)) return 0.0;
  if (y > y_bar * (1.0 + 1e-12)) throw InvalidInput("psi_hat requires y <= y_bar");
  if (y == 0.0) return 0.0;
  if (y >= y_bar) return 1.0;
  return std::exp(rho_plus * (std::log(y) - std::log(y_bar)));
}

double RuinCurve::operator()(double y) const { return psi_hat(y, y_bar, rho_plus); }

RuinCurve ruin_curve(const PolicySolution& solution) {
  return {solution.model().roots.rho_plus, solution.coefficients().y_bar};
}

double ruin_probability(const PolicySolution& solution, double x) {
  const RuinCurve curve = ruin_curve(solution);
  if (std::isinf(curve.y_bar)) {
    if (!(x >= 0.0)) throw InvalidInput("wealth must be >= 0");
    return 0.0;
  }
  return curve(solution.marginal_value(x));
}

}  // namespace ruinbound
