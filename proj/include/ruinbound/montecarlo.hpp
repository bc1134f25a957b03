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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "ruinbound/dual.hpp"

namespace ruinbound {

struct SimConfig {
  std::size_t n_paths = 100000;
  double dt = 1e-3;        ///< years
  double t_max = 0.0;      ///< years; 0 selects default_horizon(beta)
  std::uint64_t seed = 0;
  bool antithetic = true;  ///< odd n_paths is rounded up to whole pairs
  /// Keep simulating past the sampled death time so that the e^{-beta t}
  /// weighted estimators can be formed. Paths then run to ruin or t_max.
  bool track_discounted = true;
  /// Primal only: add the Brownian-bridge crossing test with coefficients
  /// frozen at the start of each step.
  bool bridge_correction = true;
  /// Dual only: split each dt step into 2^refine_levels sub-steps by
  /// midpoint (Levy) construction. Coarse grid points are shared across
  /// levels, so runs at different levels are path-wise coupled.
  int refine_levels = 0;
  unsigned threads = 0;    ///< 0 uses RUINBOUND_THREADS, else all cores
};

/// Smallest t with e^{-beta t} <= 1e-6.
double default_horizon(double beta);

/// Worker count actually used for a config.
unsigned resolve_threads(const SimConfig& config);

struct SimEstimate {
  double ruin_prob = 0.0;  ///< P(tau_0 < tau_d)
  double ruin_se = 0.0;
  double ruin_prob_discounted = 0.0;  ///< E[e^{-beta tau_0}]
  double ruin_se_discounted = 0.0;
  double utility_mean = 0.0;  ///< E int_0^{tau_0 ^ tau_d} U(c_t) dt
  double utility_se = 0.0;
  double utility_mean_discounted = 0.0;  ///< E int_0^{tau_0} e^{-beta t} U(c_t) dt
  double utility_se_discounted = 0.0;
  double penalized_value = 0.0;  ///< utility_mean + P * ruin_prob
  double penalized_se = 0.0;
  std::size_t n_effective = 0;
  bool has_utility = false;
  bool has_discounted = false;
};

using FeedbackPolicy = std::function<PolicyAction(double wealth)>;

/// The optimal feedback policy sampled on a dense dual grid, for fast path
/// simulation. Between nodes c, pi and U(c) are linear in wealth; beyond the
/// top node the exact solution is evaluated.
class TabulatedPolicy {
 public:
  struct Sample {
    double consumption;
    double investment;
    double utility;
  };

  /// Nodes cover wealth in [x_ref * 1e-8, x_ref * 1e12].
  TabulatedPolicy(const PolicySolution& solution, double x_ref, std::size_t nodes = 16384,
                  double investment_scale = 1.0);

  const PolicySolution& solution() const { return solution_; }
  double investment_scale() const { return scale_; }
  std::size_t size() const { return x_.size(); }

  /// cursor is a per-path search hint; any starting value is valid.
  Sample sample(double x, std::size_t& cursor) const;
  Sample sample(double x) const;

 private:
  Sample exact(double x) const;

  PolicySolution solution_;
  double scale_;
  std::vector<double> x_;
  std::vector<double> c_;
  std::vector<double> pi_;
  std::vector<double> u_;
};

/// Euler-Maruyama on dX = (rX + (mu - r) pi - c) dt + sigma pi dZ, absorbed
/// at 0, with exponential mortality at rate beta.
SimEstimate simulate_primal(const FeedbackPolicy& policy, const UtilitySpec& utility, double x0,
                            const MarketParams& market, const SimConfig& config,
                            double penalty = 0.0);

SimEstimate simulate_primal(const TabulatedPolicy& policy, double x0, const SimConfig& config,
                            double penalty = 0.0);

/// Exact log-normal steps of dY = -(r - beta) Y dt - ((mu - r)/sigma) Y dZ
/// from y0, with Brownian-bridge first-passage detection above y_bar.
/// Only the ruin fields are filled.
SimEstimate simulate_dual(double y0, double y_bar, const MarketParams& market,
                          const RootSet& roots, const SimConfig& config);

}  // namespace ruinbound
