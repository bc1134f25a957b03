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

#include "ruinbound/calibrate.hpp"

#include <cmath>
#include <sstream>

#include "ruinbound/errors.hpp"
#include "ruinbound/ruin.hpp"

namespace ruinbound {
namespace {

void validate_request(const CalibrationRequest& req) {
  if (!(req.wealth > 0.0) || !std::isfinite(req.wealth)) {
    throw InvalidInput("wealth must be positive and finite");
  }
  if (!(req.phi >= 0.0 && req.phi <= 1.0)) throw InvalidInput("phi must lie in [0, 1]");
  if (!(req.tol_phi > 0.0)) throw InvalidInput("tol_phi must be positive");
  if (req.max_iter < 1) throw InvalidInput("max_iter must be at least 1");
}

bool admits_solution(const Model& m, double penalty) {
  return penalty < u_at_infinity(m.utility) / m.market.beta;
}

}  // namespace

double ruin_at_penalty(const Model& model, double wealth, double penalty,
                       const SolverTolerances& tol) {
  if (!admits_solution(model, penalty)) return 1.0;
  PolicySolution sol(model, select_case(model, penalty, tol), tol);
  return ruin_probability(sol, wealth);
}

double unconstrained_ruin(const CalibrationRequest& request) {
  validate_request(request);
  const Model model = make_model(request.market, request.utility);
  return ruin_at_penalty(model, request.wealth, 0.0, request.solver);
}

CalibrationResult calibrate_penalty(const CalibrationRequest& request) {
  validate_request(request);
  const Model model = make_model(request.market, request.utility);
  const SolverTolerances& tol = request.solver;
  const double x = request.wealth;
  const double phi = request.phi;
  auto ruin = [&](double p) { return ruin_at_penalty(model, x, p, tol); };
  auto assemble = [&](CalibrationResult& r) {
    if (admits_solution(model, r.penalty)) {
      r.solution.emplace(model, select_case(model, r.penalty, tol), tol);
    }
  };

  CalibrationResult out;
  const double psi_free = ruin(0.0);
  if (phi >= psi_free) {
    if (phi > psi_free) {
      std::ostringstream os;
      os.precision(17);
      os << "phi = " << phi << " exceeds the unconstrained ruin probability " << psi_free
         << "; the constraint is slack";
      if (request.strict) throw InvalidInput(os.str());
      out.warning = os.str();
    }
    out.penalty = 0.0;
    out.achieved_phi = psi_free;
    out.binding = false;
    assemble(out);
    return out;
  }

  out.binding = true;
  const double u_floor = u_at_zero(model.utility) / model.market.beta;
  if (phi == 0.0 && std::isfinite(u_floor)) {
    out.penalty = u_floor;
    out.achieved_phi = 0.0;
    assemble(out);
    return out;
  }

  // Bracket: ruin(lo) < phi (or lo = U(0)/beta where ruin is 0), ruin(hi) > phi.
  double lo = 0.0;
  double hi = 0.0;
  if (std::isfinite(u_floor)) {
    lo = u_floor;
  } else {
    double p = -1.0;
    long n = 0;
    double psi = ruin(p);
    while (psi >= phi) {
      hi = p;
      p *= 2.0;
      if (++n > 1000000 || !std::isfinite(p)) {
        std::ostringstream os;
        os << "could not bracket the penalty from below: psi(x; " << hi << ") = " << psi
           << " still >= phi = " << phi;
        throw NumericalError(os.str());
      }
      psi = ruin(p);
    }
    lo = p;
  }

  for (int i = 1; i <= request.max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) {
      std::ostringstream os;
      os.precision(17);
      os << "penalty bracket [" << lo << ", " << hi << "] collapsed before |psi - phi| <= "
         << request.tol_phi;
      throw NumericalError(os.str());
    }
    const double psi = ruin(mid);
    out.trace.push_back({mid, psi});
    out.iterations = i;
    if (std::abs(psi - phi) <= request.tol_phi) {
      out.penalty = mid;
      out.achieved_phi = psi;
      assemble(out);
      return out;
    }
    if (psi < phi) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  std::ostringstream os;
  os.precision(17);
  os << "penalty bisection did not reach tol_phi = " << request.tol_phi << " in "
     << request.max_iter << " iterations; bracket [" << lo << ", " << hi << "]";
  throw NumericalError(os.str());
}

CalibrationResult solve_constrained(const CalibrationRequest& request) {
  CalibrationResult out = calibrate_penalty(request);
  if (!out.solution) {
    throw ModelError("penalty P = 0 is at or above lim U(c)/beta: no continuous optimal "
                     "consumption strategy exists for a slack constraint");
  }
  return out;
}

}  // namespace ruinbound
