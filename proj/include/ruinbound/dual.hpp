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

#include <string_view>

#include "ruinbound/market.hpp"
#include "ruinbound/utility.hpp"

namespace ruinbound {

/// Market, its characteristic roots, and a utility that passed the
/// finiteness check. Everything in the dual construction reads from this.
struct Model {
  MarketParams market;
  RootSet roots;
  UtilitySpec utility;
};

/// Validates the market, derives the roots and rejects utilities whose
/// lambda_minus kernel diverges (ModelError).
Model make_model(const MarketParams& market, UtilitySpec utility);

/// Regimes of the penalized problem, ordered by the penalty P.
enum class DualCase {
  kI,    ///< P <= U(0)/beta: no bankruptcy, unconstrained dual map
  kII,   ///< U'(0) infinite, P above U(0)/beta: positive consumption floor
  kIII,  ///< U'(0) finite, U(0)/beta < P < P*: zero-consumption band [0, x_bar]
  kIV,   ///< U'(0) finite, P == P*
  kV,    ///< U'(0) finite, P > P*: positive consumption floor
};

std::string_view case_name(DualCase tag);

/// Coefficients of the dual solution for one penalty.
struct DualCoefficients {
  DualCase tag = DualCase::kI;
  double penalty = 0.0;
  double floor = 0.0;        ///< consumption rate at bankruptcy
  double wealth_coef = 0.0;  ///< coefficient of y^lambda_plus in the wealth map, <= 0
  double value_coef = 0.0;   ///< (lambda_plus / rho_plus) * wealth_coef
  double y_bar = kInfinity;  ///< marginal value at bankruptcy
  double x_bar = 0.0;        ///< zero-consumption threshold (case iii only)
};

struct SolverTolerances {
  double root_rel = 1e-12;       ///< relative bracket width for the consumption floor
  double inversion_rel = 1e-12;  ///< relative bracket width in y for wealth inversion
  int bracket_cap = 200;         ///< bracket expansions for inversion; the step starts at 4 and squares up to 1e16
  int floor_bracket_cap = 1100;  ///< doublings/halvings when bracketing the floor
  int max_bisection = 400;
};

/// Wealth as a function of the marginal value y.
double dual_wealth(const Model& m, double y, double floor, double wealth_coef);

/// d/dy of dual_wealth, analytic. Strictly negative.
double dual_wealth_slope(const Model& m, double y, double floor, double wealth_coef);

/// Value as a function of the marginal value y. Satisfies
/// d value / dy = y * d wealth / dy when value_coef = (lambda_plus/rho_plus) wealth_coef.
double dual_value(const Model& m, double y, double floor, double value_coef);

/// Inverse of dual_wealth on the solution domain: the y with wealth(y) = x.
/// x = 0 maps to y_bar. Throws InvalidInput below the domain floor.
double invert_dual_wealth(const Model& m, const DualCoefficients& k, double x,
                          const SolverTolerances& tol = {});

/// Penalty at which the bankruptcy marginal value reaches U'(0). Requires
/// finite U(0) and U'(0); throws ModelError otherwise.
double critical_penalty(const Model& m);

/// Strictly decreasing function of c whose root is the consumption floor.
double floor_equation(const Model& m, double penalty, double c);

/// Unique positive root of floor_equation (cases ii and v).
double solve_floor(const Model& m, double penalty, const SolverTolerances& tol = {});

struct WealthCoefficient {
  double wealth_coef = 0.0;
  double y_bar = kInfinity;
};

/// Homogeneous coefficient and bankruptcy level for a given case.
WealthCoefficient solve_wealth_coef(const Model& m, double penalty, double floor, DualCase tag);

/// Classifies the penalty and solves for all coefficients. Throws ModelError
/// when P >= lim U(c)/beta, where no continuous optimal strategy exists.
DualCoefficients select_case(const Model& m, double penalty, const SolverTolerances& tol = {});

struct PolicyAction {
  double consumption = 0.0;  ///< rate per year
  double investment = 0.0;   ///< currency amount in the risky asset
};

/// Everything the feedback policy needs at one wealth level.
struct PolicyPoint {
  double wealth = 0.0;
  double marginal = 0.0;  ///< V'(x), the dual variable
  double value = 0.0;
  PolicyAction action;
};

/// Value function and feedback policy for one penalty. Immutable.
class PolicySolution {
 public:
  PolicySolution(Model model, DualCoefficients coeffs, SolverTolerances tol = {});

  const Model& model() const { return model_; }
  const DualCoefficients& coefficients() const { return coeffs_; }
  const SolverTolerances& tolerances() const { return tol_; }

  /// V'(x). Infinite only at x = 0 in case i.
  double marginal_value(double x) const;
  double value(double x) const;
  PolicyAction policy(double x) const;
  PolicyPoint evaluate(double x) const;

  /// Same quantities given the dual variable directly.
  double value_at_dual(double y) const;
  PolicyAction policy_at_dual(double y) const;

  /// beta V - (r x - c) V' - U(c) + gamma V'^2 / V'' with analytic derivatives.
  double hjb_residual(double x) const;

 private:
  Model model_;
  DualCoefficients coeffs_;
  SolverTolerances tol_;
};

}  // namespace ruinbound
