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

#include <optional>
#include <string>
#include <vector>

#include "ruinbound/dual.hpp"

namespace ruinbound {

struct CalibrationRequest {
  MarketParams market;
  UtilitySpec utility = UtilitySpec::log();
  double wealth = 1.0;     ///< wealth level at which the constraint is imposed, > 0
  double phi = 0.0;        ///< ruin tolerance in [0, 1]
  double tol_phi = 1e-6;   ///< accepted |psi - phi| at the returned penalty
  int max_iter = 200;      ///< bisection cap
  bool strict = false;     ///< reject phi above the unconstrained ruin probability
  SolverTolerances solver;
};

struct CalibrationStep {
  double penalty = 0.0;
  double ruin = 0.0;
};

struct CalibrationResult {
  double penalty = 0.0;
  /// Empty only when the returned penalty admits no continuous strategy
  /// (non-binding constraint with lim U(c) / beta <= 0).
  std::optional<PolicySolution> solution;
  double achieved_phi = 0.0;
  int iterations = 0;
  bool binding = false;
  std::string warning;
  std::vector<CalibrationStep> trace;  ///< every bisection midpoint, in order
};

/// Ruin probability at wealth x for penalty P. For P >= lim U(c)/beta the
/// limit value 1 is returned (the investor consumes everything at once).
double ruin_at_penalty(const Model& model, double wealth, double penalty,
                       const SolverTolerances& tol = {});

/// Ruin probability of the unconstrained optimum (P = 0).
double unconstrained_ruin(const CalibrationRequest& request);

/// Bisection on P in [P_lo, 0] until |psi(x; P) - phi| <= tol_phi.
CalibrationResult calibrate_penalty(const CalibrationRequest& request);

/// calibrate_penalty plus a guaranteed policy solution; throws ModelError
/// when the calibrated penalty has no continuous optimal strategy.
CalibrationResult solve_constrained(const CalibrationRequest& request);

}  // namespace ruinbound
