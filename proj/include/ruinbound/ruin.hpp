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

#include "ruinbound/dual.hpp"

namespace ruinbound {

/// Ruin probability as a function of the dual variable for one penalty.
struct RuinCurve {
  double rho_plus = 0.0;
  double y_bar = kInfinity;

  /// (y / y_bar)^rho_plus on [0, y_bar]; identically 0 when y_bar is infinite.
  double operator()(double y) const;
};

/// (y / y_bar)^rho_plus, computed in log space. Throws InvalidInput for
/// y > y_bar (beyond a relative slack of 1e-12).
double psi_hat(double y, double y_bar, double rho_plus);

RuinCurve ruin_curve(const PolicySolution& solution);

/// Lifetime ruin probability at wealth x under the optimal policy of
/// `solution`. Zero everywhere in case i, one at x = 0 otherwise.
double ruin_probability(const PolicySolution& solution, double x);

}  // namespace ruinbound
