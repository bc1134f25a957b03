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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "ruinbound/calibrate.hpp"
#include "ruinbound/montecarlo.hpp"
#include "ruinbound/ruin.hpp"

using namespace ruinbound;
using fixtures::kM0;

namespace {

struct Verdict {
  bool passed = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

// |est - target| <= 3 se
Verdict within_3se(const char* label, double est, double se, double target) {
  const double z = std::abs(est - target) / se;
  return {z <= 3.0, fmt("%s %.6f se %.2e target %.6f |z| %.2f", label, est, se, target, z)};
}

Verdict c1_roots() {
  std::mt19937_64 gen(20261016);
  std::uniform_real_distribution<double> rate(0.001, 0.2);
  std::uniform_real_distribution<double> vol(0.05, 0.6);
  std::uniform_real_distribution<double> premium(0.001, 0.3);
  std::uniform_real_distribution<double> log_ratio(-8.0, 0.0);
  double worst_quad = 0.0;
  double worst_ode = 0.0;
  bool ok = true;
  for (int i = 0; i < 100; ++i) {
    MarketParams p;
    p.r = rate(gen);
    p.beta = rate(gen);
    p.sigma = vol(gen);
    p.mu = p.r + premium(gen);
    const RootSet k = derive_roots(p);
    for (double l : {k.lambda_minus, k.lambda_plus}) {
      const double scale = std::abs(k.gamma * l * l) + std::abs((p.r - p.beta - k.gamma) * l) + p.r;
      worst_quad = std::max(worst_quad, std::abs(lambda_quadratic(p, k, l)) / scale);
    }
    ok = ok && k.lambda_minus < -1.0 && k.lambda_plus > 0.0;
    ok = ok && k.rho_plus == 1.0 + k.lambda_plus && k.rho_minus == 1.0 + k.lambda_minus;
    // beta psi = (beta - r) y psi' + gamma y^2 psi'' for psi = (y / y_bar)^rho_plus
    const double y_bar = 3.7;
    for (int j = 0; j < 10; ++j) {
      const double y = y_bar * std::exp(log_ratio(gen));
      const double rho = k.rho_plus;
      const double f = psi_hat(y, y_bar, rho);
      const double f1 = rho * f / y;
      const double f2 = rho * (rho - 1.0) * f / (y * y);
      const double a = p.beta * f;
      const double b = (p.beta - p.r) * y * f1;
      const double c = k.gamma * y * y * f2;
      worst_ode = std::max(worst_ode, std::abs(a - b - c) / (std::abs(a) + std::abs(b) + std::abs(c)));
    }
  }
  ok = ok && worst_quad <= 1e-12 && worst_ode <= 1e-10;
  return {ok, fmt("max scaled residual %.2e, max ode residual %.2e", worst_quad, worst_ode)};
}

Verdict c2_merton() {
  const Model m = make_model(kM0, UtilitySpec::power(0.5));
  const PolicySolution s(m, select_case(m, 0.0));
  double ec = 0.0, ep = 0.0, ev = 0.0;
  for (double x : log_grid(0.01, 100.0, 101)) {
    const PolicyPoint pt = s.evaluate(x);
    ec = std::max(ec, std::abs(pt.action.consumption - 0.02 * x) / (0.02 * x));
    ep = std::max(ep, std::abs(pt.action.investment - 2.0 * x) / (2.0 * x));
    const double v = 10.0 * std::sqrt(2.0) * std::sqrt(x);
    ev = std::max(ev, std::abs(pt.value - v) / v);
  }
  const bool ok = s.coefficients().tag == DualCase::kI && ec <= 1e-8 && ep <= 1e-6 && ev <= 1e-8;
  return {ok, fmt("rel err c %.1e pi %.1e V %.1e", ec, ep, ev)};
}

Verdict c3_inversion() {
  double worst = 0.0;
  for (const auto& inst : fixtures::case_instances()) {
    const PolicySolution s = fixtures::solve(inst);
    const DualCoefficients& k = s.coefficients();
    if (k.tag != inst.expected) return {false, "case " + inst.label + " misclassified"};
    const double y_hi = std::isfinite(k.y_bar) ? k.y_bar : s.marginal_value(inst.wealth / 100.0);
    const double y_lo = s.marginal_value(inst.wealth * 100.0);
    for (double y : log_grid(y_lo, y_hi, 200)) {
      const double x = std::max(0.0, dual_wealth(inst.model, y, k.floor, k.wealth_coef));
      worst = std::max(worst, std::abs(invert_dual_wealth(inst.model, k, x) - y) / y);
    }
  }
  const Model shifted = make_model(kM0, UtilitySpec::shifted_power(2.0, 1.0, 0.2));
  return {worst <= 1e-9, fmt("max rel err %.2e over cases i-v, P* = %.12f", worst, critical_penalty(shifted))};
}

Verdict c4_hjb() {
  double worst = 0.0;
  for (const auto& inst : fixtures::case_instances()) {
    const PolicySolution s = fixtures::solve(inst);
    for (double x : log_grid(inst.wealth / 100.0, inst.wealth * 100.0, 50)) {
      worst = std::max(worst, std::abs(s.hjb_residual(x)) / (1.0 + std::abs(s.value(x))));
    }
  }
  return {worst <= 1e-6, fmt("max |residual| / (1 + |V|) %.2e", worst)};
}

// p = 2 at P = -1 (at P = 0 the bankruptcy level is infinite).
PolicySolution power2_solution() {
  const Model m = make_model(kM0, UtilitySpec::power(2.0));
  return PolicySolution(m, select_case(m, -1.0));
}

Verdict c5_dual_mc() {
  const PolicySolution s = power2_solution();
  const double y_bar = s.coefficients().y_bar;
  SimConfig cfg;
  cfg.n_paths = 100000;
  cfg.dt = 1e-3;
  cfg.seed = 5;
  cfg.track_discounted = false;
  const SimEstimate e = simulate_dual(0.5 * y_bar, y_bar, kM0, s.model().roots, cfg);
  return within_3se("psi", e.ruin_prob, e.ruin_se, std::pow(0.5, std::sqrt(2.0)));
}

Verdict c6_constant_policy() {
  SimConfig cfg;
  cfg.n_paths = 100000;
  cfg.dt = 1e-3;
  cfg.seed = 6;
  cfg.track_discounted = false;
  const FeedbackPolicy constant = [](double) { return PolicyAction{0.05, 0.0}; };
  const SimEstimate e = simulate_primal(constant, UtilitySpec::log(), 1.0, kM0, cfg);
  return within_3se("psi", e.ruin_prob, e.ruin_se, 0.36);
}

CalibrationResult calibrated(const UtilitySpec& u, double x, double phi) {
  CalibrationRequest req;
  req.market = kM0;
  req.utility = u;
  req.wealth = x;
  req.phi = phi;
  return calibrate_penalty(req);
}

SimConfig coarse_config(std::uint64_t seed) {
  SimConfig cfg;
  cfg.n_paths = 100000;
  cfg.dt = 1e-2;
  cfg.seed = seed;
  cfg.track_discounted = false;
  return cfg;
}

Verdict c7_calibration() {
  const CalibrationResult res = calibrated(UtilitySpec::power(2.0), 10.0, 0.05);
  const double psi = ruin_probability(*res.solution, 10.0);
  const bool analytic = std::abs(psi - 0.05) <= 1e-6 && res.iterations <= 200;
  const TabulatedPolicy table(*res.solution, 10.0);
  const SimEstimate e = simulate_primal(table, 10.0, coarse_config(7), res.penalty);
  Verdict v = within_3se("mc psi", e.ruin_prob, e.ruin_se, psi);
  v.passed = v.passed && analytic;
  v.detail = fmt("P %.10f psi %.10f in %d iterations; ", res.penalty, psi, res.iterations) + v.detail;
  return v;
}

Verdict c8_monotone() {
  struct Inst {
    const char* name;
    UtilitySpec u;
    double x;
  };
  const Inst insts[] = {{"power p=2", UtilitySpec::power(2.0), 10.0},
                        {"shifted power", UtilitySpec::shifted_power(2.0, 1.0, 0.2), 1.0},
                        {"log", UtilitySpec::log(), 1.0}};
  Verdict v;
  for (const Inst& in : insts) {
    const Model m = make_model(kM0, in.u);
    CalibrationRequest req;
    req.market = kM0;
    req.utility = in.u;
    req.wealth = in.x;
    const double unconstrained = unconstrained_ruin(req);
    // -1e4 .. -1e-8 log-spaced, then 0.
    std::vector<double> grid;
    for (int j = 0; j < 49; ++j) grid.push_back(-std::pow(10.0, 4.0 - 12.0 * j / 48.0));
    grid.push_back(0.0);
    std::vector<double> psi;
    for (double p : grid) psi.push_back(ruin_at_penalty(m, in.x, p));
    double drop = 0.0;
    for (std::size_t j = 1; j < psi.size(); ++j) drop = std::max(drop, psi[j - 1] - psi[j]);
    const double lower = psi.front();
    const double upper_gap = std::abs(psi[psi.size() - 2] - unconstrained);
    const bool ok = drop <= 1e-10 && lower <= 1e-5 && upper_gap <= 1e-6 && psi.back() == unconstrained;
    v.passed = v.passed && ok;
    v.detail += fmt("%s%s: max drop %.1e, psi(-1e4) %.1e, |psi(-1e-8) - %.6f| %.1e", v.detail.empty() ? "" : "; ",
                    in.name, std::max(drop, 0.0), lower, unconstrained, upper_gap);
  }
  return v;
}

Verdict c9_dominance() {
  struct Inst {
    const char* name;
    UtilitySpec u;
    double x;
    double phi;
  };
  const Inst insts[] = {{"power p=2", UtilitySpec::power(2.0), 10.0, 0.05},
                        {"shifted power", UtilitySpec::shifted_power(2.0, 1.0, 0.2), 1.0, 0.5}};
  Verdict v;
  std::uint64_t seed = 90;
  for (const Inst& in : insts) {
    const CalibrationResult res = calibrated(in.u, in.x, in.phi);
    const SimConfig cfg = coarse_config(++seed);
    const SimEstimate opt = simulate_primal(TabulatedPolicy(*res.solution, in.x), in.x, cfg, res.penalty);
    const SimEstimate alt = simulate_primal(TabulatedPolicy(*res.solution, in.x, 16384, 0.8), in.x, cfg, res.penalty);
    const double joint = std::hypot(opt.penalized_se, alt.penalized_se);
    const double margin = (opt.penalized_value - alt.penalized_value) / joint;
    v.passed = v.passed && margin >= -2.0;
    v.detail += fmt("%s%s: %.6f vs %.6f (%+.2f joint se)", v.detail.empty() ? "" : "; ", in.name, opt.penalized_value,
                    alt.penalized_value, margin);
  }
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict c10_reproducible() {
  const auto dir = std::filesystem::temp_directory_path() / "ruinbound_acceptance";
  std::filesystem::create_directories(dir);
  const std::string cfg = std::string(RUINBOUND_SOURCE_DIR) + "/configs/calibrate.cfg";
  std::vector<std::string> outputs;
  for (const char* threads : {"1", "8"}) {
    const auto out = dir / (std::string("simulate_") + threads + ".json");
    const std::string cmd = std::string("RUINBOUND_THREADS=") + threads + " " + RUINBOUND_TOOL +
                            " simulate --config " + cfg + " > " + out.string();
    if (std::system(cmd.c_str()) != 0) return {false, std::string("simulate failed with ") + threads + " threads"};
    outputs.push_back(slurp(out));
  }
  std::filesystem::remove_all(dir);
  const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
  return {same, fmt("%zu bytes with 1 thread, %zu with 8, %s", outputs[0].size(), outputs[1].size(),
                    same ? "identical" : "different")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Verdict()> run;
  };
  const Criterion criteria[] = {
      {1, "root suite", 1.0, c1_roots},
      {2, "Merton oracle", 1.0, c2_merton},
      {3, "dual inversion", 5.0, c3_inversion},
      {4, "HJB residual", 5.0, c4_hjb},
      {5, "ruin formula vs dual Monte Carlo", 60.0, c5_dual_mc},
      {6, "constant-policy primal Monte Carlo", 60.0, c6_constant_policy},
      {7, "calibration contract", 120.0, c7_calibration},
      {8, "monotonicity in the penalty", 0.0, c8_monotone},
      {9, "Lagrangian dominance", 0.0, c9_dominance},
      {10, "reproducibility across thread counts", 0.0, c10_reproducible},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0.0 && secs >= c.budget_s) {
      v.passed = false;
      v.detail += fmt(" (over the %.0f s budget)", c.budget_s);
    }
    if (!v.passed) ++failures;
    std::printf("%s %2d %s: %s [%.2f s]\n", v.passed ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of 10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
