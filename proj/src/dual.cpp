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

#include "ruinbound/dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ruinbound/errors.hpp"

namespace ruinbound {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// 1 / (gamma (lambda_plus - lambda_minus)).
double kernel_scale(const RootSet& k) {
  return 1.0 / (k.gamma * (k.lambda_plus - k.lambda_minus));
}

// Quantities shared by the wealth map, its slope and the value map at one y.
struct DualTerms {
  double consumption;  // I(y)
  double plus_kernel;  // signed integral of U'^-lambda_plus from floor to I(y)
  double minus_tail;   // integral of U'^-lambda_minus from I(y) to inf
};

DualTerms dual_terms(const Model& m, double y, double floor) {
  if (!(y > 0.0) || !std::isfinite(y)) {
    throw InvalidInput("dual variable must be positive and finite");
  }
  if (floor > 0.0) {
    const double cap = u_marginal(m.utility, floor);
    if (y > cap * (1.0 + 1e-12)) {
      throw InvalidInput("dual variable above U'(floor), outside the wealth map domain");
    }
  }
  DualTerms t{};
  t.consumption = inverse_marginal(m.utility, y);
  if (t.consumption >= floor) {
    t.plus_kernel = kernel_integral(m.utility, m.roots, KernelBranch::kPlus, floor, t.consumption);
  } else {
    // Only reachable through rounding at y = U'(floor).
    t.plus_kernel =
        -kernel_integral(m.utility, m.roots, KernelBranch::kPlus, t.consumption, floor);
  }
  t.minus_tail = kernel_integral(m.utility, m.roots, KernelBranch::kMinus, t.consumption, kInfinity);
  return t;
}

double wealth_from_terms(const Model& m, const DualTerms& t, double y, double wealth_coef) {
  const RootSet& k = m.roots;
  const double yp = std::pow(y, k.lambda_plus);
  const double ym = std::pow(y, k.lambda_minus);
  return wealth_coef * yp + t.consumption / m.market.r -
         kernel_scale(k) * (yp / k.lambda_plus * t.plus_kernel + ym / k.lambda_minus * t.minus_tail);
}

double slope_from_terms(const Model& m, const DualTerms& t, double y, double wealth_coef) {
  const RootSet& k = m.roots;
  const double yp = std::pow(y, k.lambda_plus - 1.0);
  const double ym = std::pow(y, k.lambda_minus - 1.0);
  return k.lambda_plus * wealth_coef * yp - kernel_scale(k) * (yp * t.plus_kernel + ym * t.minus_tail);
}

double value_from_terms(const Model& m, const DualTerms& t, double y, double value_coef) {
  const RootSet& k = m.roots;
  const double yp = std::pow(y, k.rho_plus);
  const double ym = std::pow(y, k.rho_minus);
  return value_coef * yp + u_value(m.utility, t.consumption) / m.market.beta -
         kernel_scale(k) * (yp / k.rho_plus * t.plus_kernel + ym / k.rho_minus * t.minus_tail);
}

}  // namespace

Model make_model(const MarketParams& market, UtilitySpec utility) {
  Model m{validate_params(market), derive_roots(market), std::move(utility)};
  if (!check_finiteness(m.utility, m.roots)) {
    throw ModelError("utility violates the finiteness assumption: the integral of "
                     "U'^-lambda_minus over [c, inf) diverges for " +
                     m.utility.describe());
  }
  return m;
}

std::string_view case_name(DualCase tag) {
  switch (tag) {
    case DualCase::kI: return "i";
    case DualCase::kII: return "ii";
    case DualCase::kIII: return "iii";
    case DualCase::kIV: return "iv";
    case DualCase::kV: return "v";
  }
  return "?";
}

double dual_wealth(const Model& m, double y, double floor, double wealth_coef) {
  return wealth_from_terms(m, dual_terms(m, y, floor), y, wealth_coef);
}

double dual_wealth_slope(const Model& m, double y, double floor, double wealth_coef) {
  return slope_from_terms(m, dual_terms(m, y, floor), y, wealth_coef);
}

double dual_value(const Model& m, double y, double floor, double value_coef) {
  return value_from_terms(m, dual_terms(m, y, floor), y, value_coef);
}

double invert_dual_wealth(const Model& m, const DualCoefficients& k, double x,
                          const SolverTolerances& tol) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidInput("wealth must be finite and >= 0");
  auto wealth = [&](double y) { return dual_wealth(m, y, k.floor, k.wealth_coef); };

  double lo = 0.0;
  double hi = 0.0;
  if (std::isfinite(k.y_bar)) {
    const double base = wealth(k.y_bar);
    if (x < base - 1e-12 * (1.0 + std::abs(base))) {
      throw InvalidInput("wealth below the domain floor of the dual map");
    }
    if (x <= base) return k.y_bar;
    hi = k.y_bar;
    lo = k.y_bar;
    int n = 0;
    double step = 4.0;
    do {
      hi = lo;
      lo /= step;
      step = std::min(step * step, 1e16);
      if (++n > tol.bracket_cap || !(lo > 0.0)) throw NumericalError("could not bracket the dual variable");
    } while (wealth(lo) < x);
  } else {
    if (x == 0.0) return kInfinity;
    lo = 1.0;
    hi = 1.0;
    int n = 0;
    double step = 4.0;
    if (wealth(1.0) >= x) {
      do {
        lo = hi;
        hi *= step;
        step = std::min(step * step, 1e16);
        if (++n > tol.bracket_cap || !std::isfinite(hi)) {
          throw NumericalError("could not bracket the dual variable");
        }
      } while (wealth(hi) >= x);
    } else {
      do {
        hi = lo;
        lo /= step;
        step = std::min(step * step, 1e16);
        if (++n > tol.bracket_cap || !(lo > 0.0)) throw NumericalError("could not bracket the dual variable");
      } while (wealth(lo) < x);
    }
  }
  // Invariant: wealth(lo) >= x > wealth(hi) (or hi == y_bar). Bisect in log y,
  // then finish with one linear interpolation inside the final bracket.
  double log_lo = std::log(lo);
  double log_hi = std::log(hi);
  double w_lo = wealth(lo);
  double w_hi = wealth(hi);
  for (int i = 0; i < tol.max_bisection; ++i) {
    if (log_hi - log_lo <= tol.inversion_rel) break;
    const double mid = 0.5 * (log_lo + log_hi);
    if (mid <= log_lo || mid >= log_hi) break;
    const double w = wealth(std::exp(mid));
    if (w == x) return std::exp(mid);
    if (w > x) {
      log_lo = mid;
      w_lo = w;
    } else {
      log_hi = mid;
      w_hi = w;
    }
  }
  double t = 0.5;
  if (w_lo > w_hi && std::isfinite(w_lo) && std::isfinite(w_hi)) {
    t = std::clamp((w_lo - x) / (w_lo - w_hi), 0.0, 1.0);
  }
  return std::exp(log_lo + t * (log_hi - log_lo));
}

double critical_penalty(const Model& m) {
  const double u0 = u_at_zero(m.utility);
  const double up0 = marginal_at_zero(m.utility);
  if (!std::isfinite(u0) || !std::isfinite(up0)) {
    throw ModelError("critical penalty requires finite U(0) and U'(0)");
  }
  const RootSet& k = m.roots;
  const double beta = m.market.beta;
  const double tail = kernel_integral(m.utility, k, KernelBranch::kMinus, 0.0, kInfinity);
  return u0 / beta - std::pow(up0, k.rho_minus) / (beta * k.lambda_minus) * tail;
}

double floor_equation(const Model& m, double penalty, double c) {
  const RootSet& k = m.roots;
  const double up = u_marginal(m.utility, c);
  const double tail = kernel_integral(m.utility, k, KernelBranch::kMinus, c, kInfinity);
  const double u = u_value(m.utility, c);
  const double consumption_term = c == 0.0 ? 0.0 : k.lambda_plus / m.market.r * c * up;
  return k.rho_plus * penalty - std::pow(up, k.rho_minus) * tail / (k.gamma * k.lambda_minus * k.rho_minus) -
         k.rho_plus / m.market.beta * u + consumption_term;
}

double solve_floor(const Model& m, double penalty, const SolverTolerances& tol) {
  auto f = [&](double c) {
    const double v = floor_equation(m, penalty, c);
    if (std::isnan(v)) {
      throw NumericalError("consumption floor equation overflows double precision (penalty too far below the case boundary)");
    }
    return v;
  };
  double start = inverse_marginal(m.utility, 1.0);
  if (!(start > 0.0) || !std::isfinite(start)) start = 1.0;

  // lo has f > 0, hi has f < 0.
  double lo = start;
  double hi = start;
  const double f0 = f(start);
  if (f0 == 0.0) return start;
  int n = 0;
  if (f0 > 0.0) {
    do {
      lo = hi;
      hi *= 2.0;
      if (++n > tol.floor_bracket_cap || !std::isfinite(hi)) {
        throw NumericalError("consumption floor: no sign change above c = " + std::to_string(start) +
                             " (penalty too close to lim U/beta?)");
      }
    } while (f(hi) > 0.0);
  } else {
    do {
      hi = lo;
      lo *= 0.5;
      if (++n > tol.floor_bracket_cap || !(lo > 0.0)) {
        throw NumericalError("consumption floor: no sign change below c = " + std::to_string(start) +
                             " (penalty too close to the case boundary?)");
      }
    } while (f(lo) < 0.0);
  }

  const double residual_tol = 1e-10 * (1.0 + std::abs(m.roots.rho_plus * penalty));
  double log_lo = std::log(lo);
  double log_hi = std::log(hi);
  double mid = 0.5 * (log_lo + log_hi);
  for (int i = 0; i < tol.max_bisection; ++i) {
    mid = 0.5 * (log_lo + log_hi);
    if (mid <= log_lo || mid >= log_hi) break;
    const double v = f(std::exp(mid));
    if (v == 0.0) break;
    if (v > 0.0) {
      log_lo = mid;
    } else {
      log_hi = mid;
    }
    if (log_hi - log_lo <= tol.root_rel && std::abs(v) <= residual_tol) break;
  }
  return std::exp(mid);
}

WealthCoefficient solve_wealth_coef(const Model& m, double penalty, double floor, DualCase tag) {
  const RootSet& k = m.roots;
  const double beta = m.market.beta;
  switch (tag) {
    case DualCase::kI:
      return {0.0, kInfinity};
    case DualCase::kIII: {
      const double excess = penalty - u_at_zero(m.utility) / beta;
      if (!(excess > 0.0)) throw InvalidInput("case iii requires P > U(0)/beta");
      if (floor != 0.0) throw InvalidInput("case iii requires a zero consumption floor");
      const double tail = kernel_integral(m.utility, k, KernelBranch::kMinus, 0.0, kInfinity);
      const double y_bar = std::pow(-beta * k.lambda_minus * excess / tail, 1.0 / k.rho_minus);
      const double b = -beta * kernel_scale(k) * excess / std::pow(y_bar, k.rho_plus);
      return {b, y_bar};
    }
    case DualCase::kII:
    case DualCase::kIV:
    case DualCase::kV: {
      if (tag == DualCase::kIV && floor != 0.0) {
        throw InvalidInput("case iv requires a zero consumption floor");
      }
      const double y_a = u_marginal(m.utility, floor);
      if (!std::isfinite(y_a)) throw InvalidInput("U'(floor) must be finite");
      const double tail = kernel_integral(m.utility, k, KernelBranch::kMinus, floor, kInfinity);
      const double rest =
          -floor / m.market.r + kernel_scale(k) * std::pow(y_a, k.lambda_minus) / k.lambda_minus * tail;
      return {rest / std::pow(y_a, k.lambda_plus), y_a};
    }
  }
  throw InvalidInput("unknown case");
}

DualCoefficients select_case(const Model& m, double penalty, const SolverTolerances& tol) {
  if (!std::isfinite(penalty)) throw InvalidInput("penalty must be finite");
  const double beta = m.market.beta;
  const double ceiling = u_at_infinity(m.utility) / beta;
  if (penalty >= ceiling) {
    throw ModelError("penalty P = " + std::to_string(penalty) + " >= lim U(c)/beta = " +
                     std::to_string(ceiling) + ": no continuous optimal consumption strategy exists");
  }
  DualCoefficients out;
  out.penalty = penalty;
  const double u_floor = u_at_zero(m.utility) / beta;
  if (penalty <= u_floor) {
    out.tag = DualCase::kI;
  } else if (std::isinf(marginal_at_zero(m.utility))) {
    out.tag = DualCase::kII;
  } else {
    const double pstar = critical_penalty(m);
    if (std::abs(penalty - pstar) <= 4.0 * kEps * std::max(1.0, std::abs(pstar))) {
      out.tag = DualCase::kIV;
    } else if (penalty < pstar) {
      out.tag = DualCase::kIII;
    } else {
      out.tag = DualCase::kV;
    }
  }
  if (out.tag == DualCase::kII || out.tag == DualCase::kV) {
    out.floor = solve_floor(m, penalty, tol);
  }
  const WealthCoefficient wc = solve_wealth_coef(m, penalty, out.floor, out.tag);
  out.wealth_coef = wc.wealth_coef;
  out.y_bar = wc.y_bar;
  out.value_coef = m.roots.lambda_plus / m.roots.rho_plus * out.wealth_coef;
  if (out.tag == DualCase::kIII) {
    out.x_bar = dual_wealth(m, marginal_at_zero(m.utility), 0.0, out.wealth_coef);
  }
  return out;
}

// ---------------------------------------------------------------------------
// PolicySolution

PolicySolution::PolicySolution(Model model, DualCoefficients coeffs, SolverTolerances tol)
    : model_(std::move(model)), coeffs_(coeffs), tol_(tol) {}

double PolicySolution::marginal_value(double x) const {
  return invert_dual_wealth(model_, coeffs_, x, tol_);
}

double PolicySolution::value_at_dual(double y) const {
  if (std::isinf(y)) return u_at_zero(model_.utility) / model_.market.beta;
  return dual_value(model_, y, coeffs_.floor, coeffs_.value_coef);
}

PolicyAction PolicySolution::policy_at_dual(double y) const {
  if (std::isinf(y)) return {0.0, 0.0};
  const DualTerms t = dual_terms(model_, y, coeffs_.floor);
  const MarketParams& mk = model_.market;
  const double slope = slope_from_terms(model_, t, y, coeffs_.wealth_coef);
  return {t.consumption, -(mk.mu - mk.r) / (mk.sigma * mk.sigma) * y * slope};
}

double PolicySolution::value(double x) const { return value_at_dual(marginal_value(x)); }

PolicyAction PolicySolution::policy(double x) const { return policy_at_dual(marginal_value(x)); }

PolicyPoint PolicySolution::evaluate(double x) const {
  PolicyPoint p;
  p.wealth = x;
  p.marginal = marginal_value(x);
  p.value = value_at_dual(p.marginal);
  p.action = policy_at_dual(p.marginal);
  return p;
}

double PolicySolution::hjb_residual(double x) const {
  const double y = marginal_value(x);
  if (std::isinf(y)) throw InvalidInput("HJB residual needs an interior wealth level");
  const DualTerms t = dual_terms(model_, y, coeffs_.floor);
  const MarketParams& mk = model_.market;
  const double v = value_from_terms(model_, t, y, coeffs_.value_coef);
  const double slope = slope_from_terms(model_, t, y, coeffs_.wealth_coef);
  const double c = t.consumption;
  return mk.beta * v - (mk.r * x - c) * y - u_value(model_.utility, c) +
         model_.roots.gamma * y * y * slope;
}

}  // namespace ruinbound
