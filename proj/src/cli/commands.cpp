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

#include "ruinbound/cli/commands.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <variant>
#include <vector>

#include "json.hpp"

#include "ruinbound/calibrate.hpp"
#include "ruinbound/errors.hpp"
#include "ruinbound/montecarlo.hpp"
#include "ruinbound/ruin.hpp"

namespace ruinbound::cli {
namespace {

using Value = std::variant<double, std::int64_t, bool, std::string>;

struct Field {
  std::string name;
  Value value;
};

using Record = std::vector<Field>;

void require_finite(const Record& r) {
  for (const Field& f : r) {
    if (const double* d = std::get_if<double>(&f.value); d && !std::isfinite(*d)) {
      throw NumericalError("non-finite value in output field '" + f.name + "'");
    }
  }
}

nlohmann::ordered_json to_json(const Record& r) {
  nlohmann::ordered_json obj = nlohmann::ordered_json::object();
  for (const Field& f : r) {
    std::visit([&](const auto& v) { obj[f.name] = v; }, f.value);
  }
  return obj;
}

std::string csv_cell(const Value& v) {
  if (const double* d = std::get_if<double>(&v)) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", *d);
    return buf;
  }
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const bool* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  return std::get<std::string>(v);
}

/// One record renders as a JSON object, several as an array of objects.
std::string emit(const std::vector<Record>& rows, OutputFormat format, bool single) {
  for (const Record& r : rows) require_finite(r);
  if (format == OutputFormat::kJson) {
    nlohmann::ordered_json doc;
    if (single) {
      doc = to_json(rows.front());
    } else {
      doc = nlohmann::ordered_json::array();
      for (const Record& r : rows) doc.push_back(to_json(r));
    }
    return doc.dump(2) + "\n";
  }
  std::string out;
  if (rows.empty()) return out;
  for (std::size_t i = 0; i < rows.front().size(); ++i) {
    if (i) out += ',';
    out += rows.front()[i].name;
  }
  out += '\n';
  for (const Record& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(r[i].value);
    }
    out += '\n';
  }
  return out;
}

Value y_bar_value(double y) {
  if (std::isinf(y)) return std::string(y > 0 ? "inf" : "-inf");
  return y;
}

struct Resolved {
  PolicySolution solution;
  bool binding = false;
  int iterations = 0;
  std::string warning;
};

Resolved resolve(const RunConfig& c, const Model& m) {
  const SolverTolerances tol = solver_tolerances(c);
  if (c.penalty || c.penalty_critical) {
    const double p = c.penalty_critical ? critical_penalty(m) : *c.penalty;
    return {PolicySolution(m, select_case(m, p, tol), tol), p != 0.0, 0, {}};
  }
  if (!c.phi) throw InvalidInput("config needs either phi or penalty");
  CalibrationRequest req;
  req.market = c.market;
  req.utility = m.utility;
  req.wealth = c.wealth;
  req.phi = *c.phi;
  req.tol_phi = c.tol_phi;
  req.max_iter = c.max_iter;
  req.strict = c.strict;
  req.solver = tol;
  CalibrationResult res = solve_constrained(req);
  return {*res.solution, res.binding, res.iterations, res.warning};
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = i + 1 == n ? hi : std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g[0] = lo;
  return g;
}

std::vector<double> wealth_grid(const RunConfig& c) {
  return log_grid(c.wealth * c.grid_lo_factor, c.wealth * c.grid_hi_factor, c.grid_points);
}

std::vector<double> penalty_grid(const RunConfig& c, const Model& m) {
  const SolverTolerances tol = solver_tolerances(c);
  const double ceiling = u_at_infinity(m.utility) / m.market.beta;
  double p_max = 0.0;
  if (c.frontier_p_max) {
    p_max = *c.frontier_p_max;
  } else if (ceiling <= 0.0) {
    p_max = ceiling - 1e-6 * std::max(1.0, std::abs(ceiling));
  }
  if (p_max >= ceiling) throw InvalidInput("frontier.p_max must lie below lim U(c)/beta");
  double p_min = 0.0;
  if (c.frontier_p_min) {
    p_min = *c.frontier_p_min;
  } else if (std::isfinite(u_at_zero(m.utility))) {
    p_min = std::min(u_at_zero(m.utility) / m.market.beta, p_max - 1.0);
  } else {
    // Lowest penalty worth plotting: ruin probability about 1e-4.
    p_min = p_max - 1.0;
    while (ruin_at_penalty(m, c.wealth, p_min, tol) > 1e-4 && p_min > -1e300) p_min *= 2.0;
  }
  if (!(p_min < p_max)) throw InvalidInput("frontier.p_min must lie below frontier.p_max");
  std::vector<double> g(c.frontier_points);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = p_min + (p_max - p_min) * static_cast<double>(i) / static_cast<double>(g.size() - 1);
  }
  return g;
}

std::string cmd_solve(const RunConfig& c) {
  const Model m = build_model(c);
  const Resolved r = resolve(c, m);
  const DualCoefficients& k = r.solution.coefficients();
  const PolicyPoint pt = r.solution.evaluate(c.wealth);
  Record rec{{"P", k.penalty},
             {"case", std::string(case_name(k.tag))},
             {"a", k.floor},
             {"B", k.wealth_coef},
             {"y_bar", y_bar_value(k.y_bar)},
             {"x_bar", k.x_bar},
             {"V", pt.value},
             {"c", pt.action.consumption},
             {"pi", pt.action.investment},
             {"psi", ruin_probability(r.solution, c.wealth)},
             {"binding", r.binding},
             {"iterations", std::int64_t{r.iterations}}};
  return emit({rec}, c.format, true);
}

std::string cmd_policy(const RunConfig& c) {
  const Model m = build_model(c);
  const Resolved r = resolve(c, m);
  std::vector<Record> rows;
  for (double x : wealth_grid(c)) {
    const PolicyPoint pt = r.solution.evaluate(x);
    rows.push_back({{"x", x},
                    {"V", pt.value},
                    {"c", pt.action.consumption},
                    {"pi", pt.action.investment},
                    {"psi", ruin_probability(r.solution, x)}});
  }
  return emit(rows, c.format, false);
}

std::string cmd_frontier(const RunConfig& c) {
  const Model m = build_model(c);
  const SolverTolerances tol = solver_tolerances(c);
  std::vector<Record> rows;
  for (double p : penalty_grid(c, m)) {
    const PolicySolution s(m, select_case(m, p, tol), tol);
    rows.push_back({{"P", p}, {"psi", ruin_probability(s, c.wealth)}, {"V", s.value(c.wealth)}});
  }
  return emit(rows, c.format, false);
}

void add_estimate(Record& rec, const std::string& prefix, const SimEstimate& e, bool utility) {
  rec.push_back({prefix + "ruin_prob", e.ruin_prob});
  rec.push_back({prefix + "ruin_se", e.ruin_se});
  if (e.has_discounted) {
    rec.push_back({prefix + "ruin_prob_discounted", e.ruin_prob_discounted});
    rec.push_back({prefix + "ruin_se_discounted", e.ruin_se_discounted});
  }
  if (utility) {
    rec.push_back({prefix + "utility_mean", e.utility_mean});
    rec.push_back({prefix + "utility_se", e.utility_se});
    if (e.has_discounted) {
      rec.push_back({prefix + "utility_mean_discounted", e.utility_mean_discounted});
      rec.push_back({prefix + "utility_se_discounted", e.utility_se_discounted});
    }
    rec.push_back({prefix + "penalized_value", e.penalized_value});
    rec.push_back({prefix + "penalized_se", e.penalized_se});
  }
  rec.push_back({prefix + "n_effective", static_cast<std::int64_t>(e.n_effective)});
}

std::string cmd_simulate(const RunConfig& c) {
  const Model m = build_model(c);
  const Resolved r = resolve(c, m);
  const DualCoefficients& k = r.solution.coefficients();
  const double x = c.wealth;
  const SimConfig sim = c.sim;
  const double t_max = sim.t_max > 0.0 ? sim.t_max : default_horizon(m.market.beta);

  const TabulatedPolicy table(r.solution, x);
  const SimEstimate primal = simulate_primal(table, x, sim, k.penalty);
  const double y0 = r.solution.marginal_value(x);

  Record rec{{"P", k.penalty},
             {"case", std::string(case_name(k.tag))},
             {"x", x},
             {"psi", ruin_probability(r.solution, x)},
             {"V", r.solution.value_at_dual(y0)},
             {"seed", static_cast<std::int64_t>(sim.seed)},
             {"n_paths", static_cast<std::int64_t>(sim.n_paths)},
             {"dt", sim.dt},
             {"t_max", t_max},
             {"antithetic", sim.antithetic}};
  add_estimate(rec, "primal_", primal, true);
  if (c.simulate_dual && std::isfinite(k.y_bar) && y0 < k.y_bar) {
    const SimEstimate dual = simulate_dual(y0, k.y_bar, m.market, m.roots, sim);
    add_estimate(rec, "dual_", dual, false);
  }
  return emit({rec}, c.format, true);
}

struct CheckOutcome {
  std::string name;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::int64_t points = 0;
  bool passed = true;

  void observe(double err) {
    ++points;
    if (!(err <= max_error)) max_error = std::isnan(err) ? kInfinity : err;
    if (!(err <= tolerance)) passed = false;
  }
};

// Relative inversion error of the wealth map over the dual range of the grid.
CheckOutcome check_inversion(const RunConfig& c, const PolicySolution& s) {
  CheckOutcome out{"inversion", 0.0, 1e-9};
  const Model& m = s.model();
  const DualCoefficients& k = s.coefficients();
  const double y_lo = s.marginal_value(c.wealth * c.grid_hi_factor);
  const double y_hi = std::isfinite(k.y_bar) ? k.y_bar : s.marginal_value(c.wealth * c.grid_lo_factor);
  for (double y : log_grid(y_lo, y_hi, 200)) {
    const double x = std::max(0.0, dual_wealth(m, y, k.floor, k.wealth_coef));
    out.observe(std::abs(invert_dual_wealth(m, k, x, s.tolerances()) - y) / y);
  }
  return out;
}

CheckOutcome check_hjb(const RunConfig& c, const PolicySolution& s) {
  CheckOutcome out{"hjb_residual", 0.0, 1e-6};
  for (double x : log_grid(c.wealth * c.grid_lo_factor, c.wealth * c.grid_hi_factor, 50)) {
    out.observe(std::abs(s.hjb_residual(x)) / (1.0 + std::abs(s.value(x))));
  }
  return out;
}

// The ruin probability must solve
//   sigma^2 pi^2 psi'' / 2 + (r x + (mu - r) pi - c) psi' - beta psi = 0
// along the optimal feedback policy. Derivatives in x go through the dual
// variable; the second one by a central difference in log y.
CheckOutcome check_ruin_ode(const RunConfig& c, const PolicySolution& s) {
  CheckOutcome out{"ruin_ode", 0.0, 1e-6};
  const Model& m = s.model();
  const DualCoefficients& k = s.coefficients();
  if (!std::isfinite(k.y_bar)) return out;
  const MarketParams& mk = m.market;
  const double rho = m.roots.rho_plus;
  auto dpsi_dx = [&](double y) {
    return rho * psi_hat(y, k.y_bar, rho) / (y * dual_wealth_slope(m, y, k.floor, k.wealth_coef));
  };
  for (double x : log_grid(c.wealth * c.grid_lo_factor, c.wealth * c.grid_hi_factor, 50)) {
    const double y = s.marginal_value(x);
    const double h = 1e-4;
    const double y_up = std::min(y * std::exp(h), k.y_bar);
    const double y_dn = y * std::exp(-h);
    const double x_up = dual_wealth(m, y_up, k.floor, k.wealth_coef);
    const double x_dn = dual_wealth(m, y_dn, k.floor, k.wealth_coef);
    const double d1 = dpsi_dx(y);
    const double d2 = (dpsi_dx(y_up) - dpsi_dx(y_dn)) / (x_up - x_dn);
    const PolicyAction a = s.policy_at_dual(y);
    const double psi = psi_hat(y, k.y_bar, rho);
    const double diffusion = 0.5 * mk.sigma * mk.sigma * a.investment * a.investment * d2;
    const double drift = (mk.r * x + (mk.mu - mk.r) * a.investment - a.consumption) * d1;
    const double scale = std::abs(diffusion) + std::abs(drift) + mk.beta * psi;
    if (scale == 0.0) continue;
    out.observe(std::abs(diffusion + drift - mk.beta * psi) / scale);
  }
  return out;
}

CheckOutcome check_wealth_monotonicity(const RunConfig& c, const PolicySolution& s) {
  CheckOutcome out{"monotone_in_wealth", 0.0, 1e-12};
  double prev_v = -kInfinity;
  double prev_c = -kInfinity;
  double prev_psi = kInfinity;
  for (double x : wealth_grid(c)) {
    const PolicyPoint pt = s.evaluate(x);
    const double psi = ruin_probability(s, x);
    const double scale = 1.0 + std::abs(pt.value);
    double err = 0.0;
    err = std::max(err, (prev_v - pt.value) / scale);
    err = std::max(err, (prev_c - pt.action.consumption) / (1.0 + pt.action.consumption));
    err = std::max(err, psi - prev_psi);
    err = std::max(err, std::max(-psi, psi - 1.0));
    out.observe(std::max(0.0, err));
    prev_v = pt.value;
    prev_c = pt.action.consumption;
    prev_psi = psi;
  }
  return out;
}

CheckOutcome check_penalty_monotonicity(const RunConfig& c, const Model& m) {
  CheckOutcome out{"monotone_in_penalty", 0.0, 1e-10};
  const SolverTolerances tol = solver_tolerances(c);
  double prev = -kInfinity;
  for (double p : penalty_grid(c, m)) {
    const double psi = ruin_at_penalty(m, c.wealth, p, tol);
    out.observe(std::max(0.0, prev - psi));
    prev = psi;
  }
  return out;
}

std::string cmd_check(const RunConfig& c, int& status) {
  const Model m = build_model(c);
  const Resolved r = resolve(c, m);
  const std::vector<CheckOutcome> checks{
      check_inversion(c, r.solution), check_hjb(c, r.solution), check_ruin_ode(c, r.solution),
      check_wealth_monotonicity(c, r.solution), check_penalty_monotonicity(c, m)};
  std::vector<Record> rows;
  bool all = true;
  for (const CheckOutcome& o : checks) {
    all = all && o.passed;
    rows.push_back({{"check", o.name},
                    {"case", std::string(case_name(r.solution.coefficients().tag))},
                    {"max_error", o.max_error},
                    {"tolerance", o.tolerance},
                    {"points", o.points},
                    {"passed", o.passed}});
  }
  if (!all) status = kExitCheckFailed;
  return emit(rows, c.format, false);
}

}  // namespace

std::string render(std::string_view command, const RunConfig& config, int& status) {
  status = kExitOk;
  if (command == "solve") return cmd_solve(config);
  if (command == "policy") return cmd_policy(config);
  if (command == "frontier") return cmd_frontier(config);
  if (command == "simulate") return cmd_simulate(config);
  if (command == "check") return cmd_check(config, status);
  throw InvalidInput("unknown command '" + std::string(command) + "'");
}

int run(std::string_view command, const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    int status = kExitOk;
    const std::string text = render(command, config, status);
    if (config.out_path.empty()) {
      out << text;
      out.flush();
    } else {
      std::ofstream file(config.out_path, std::ios::binary);
      if (!file) throw InvalidInput("cannot write " + config.out_path.string());
      file << text;
    }
    if (status == kExitCheckFailed) err << "check suite failed\n";
    return status;
  } catch (const InvalidInput& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << '\n';
    return kExitModel;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace ruinbound::cli
