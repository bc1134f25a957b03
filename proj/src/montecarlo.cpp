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

#include "ruinbound/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include <boost/random/normal_distribution.hpp>

#include "ruinbound/errors.hpp"
#include "ruinbound/philox.hpp"

namespace ruinbound {
namespace {

constexpr std::size_t kUnitsPerBlock = 256;
constexpr double kBridgeCutoff = -40.0;  // skip exp() when the crossing probability is below e^-40

// Stream ids in the last counter word.
constexpr std::uint32_t kNormalStream = 1;
constexpr std::uint32_t kMortalityStream = 2;
constexpr std::uint32_t kBridgeStream = 3;
constexpr std::uint32_t kRefineStream = 4;

struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    n += 1.0;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }

  static Moments merge(const Moments& a, const Moments& b) {
    if (a.n == 0.0) return b;
    if (b.n == 0.0) return a;
    Moments out;
    out.n = a.n + b.n;
    const double d = b.mean - a.mean;
    out.mean = a.mean + d * (b.n / out.n);
    out.m2 = a.m2 + b.m2 + d * d * (a.n * b.n / out.n);
    return out;
  }

  double se() const { return n > 1.0 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0; }
};

struct PathOutcome {
  double ruin = 0.0;             // 1{tau_0 < tau_d}
  double ruin_discounted = 0.0;  // e^{-beta tau_0}
  double utility = 0.0;
  double utility_discounted = 0.0;
};

enum Field { kRuin, kRuinDisc, kUtil, kUtilDisc, kPenalized, kFieldCount };

struct BlockStats {
  Moments f[kFieldCount];

  static BlockStats merge(const BlockStats& a, const BlockStats& b) {
    BlockStats out;
    for (int i = 0; i < kFieldCount; ++i) out.f[i] = Moments::merge(a.f[i], b.f[i]);
    return out;
  }
};

// Fixed-shape pairwise reduction over [lo, hi).
BlockStats reduce(const std::vector<BlockStats>& blocks, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return blocks[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return BlockStats::merge(reduce(blocks, lo, mid), reduce(blocks, mid, hi));
}

void validate_config(const SimConfig& c, double t_max) {
  if (c.n_paths < 1) throw InvalidInput("n_paths must be >= 1");
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw InvalidInput("dt must be positive");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidInput("t_max must be positive");
  if (c.n_paths > (std::size_t{1} << 32)) throw InvalidInput("n_paths must be <= 2^32");
  if (t_max / c.dt > 4.0e9) throw InvalidInput("t_max / dt must be below 4e9 steps");
  if (c.refine_levels < 0 || c.refine_levels > 16) {
    throw InvalidInput("refine_levels must lie in [0, 16]");
  }
}

double horizon(const SimConfig& c, double beta) {
  return c.t_max > 0.0 ? c.t_max : default_horizon(beta);
}

// Runs `path(unit, mirrored)` for every path and reduces deterministically.
template <class PathFn>
SimEstimate run_paths(const SimConfig& config, double penalty, PathFn&& path) {
  const std::size_t units = config.antithetic ? (config.n_paths + 1) / 2 : config.n_paths;
  const std::size_t n_blocks = (units + kUnitsPerBlock - 1) / kUnitsPerBlock;
  std::vector<BlockStats> blocks(n_blocks);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(config), n_blocks));

  bool track = config.track_discounted;
  auto run_block = [&](std::size_t b) {
    BlockStats s;
    const std::size_t end = std::min(units, (b + 1) * kUnitsPerBlock);
    for (std::size_t u = b * kUnitsPerBlock; u < end; ++u) {
      PathOutcome o = path(u, false);
      if (config.antithetic) {
        const PathOutcome m = path(u, true);
        o.ruin = 0.5 * (o.ruin + m.ruin);
        o.ruin_discounted = 0.5 * (o.ruin_discounted + m.ruin_discounted);
        o.utility = 0.5 * (o.utility + m.utility);
        o.utility_discounted = 0.5 * (o.utility_discounted + m.utility_discounted);
      }
      s.f[kRuin].add(o.ruin);
      s.f[kRuinDisc].add(o.ruin_discounted);
      s.f[kUtil].add(o.utility);
      s.f[kUtilDisc].add(o.utility_discounted);
      s.f[kPenalized].add(track ? o.utility_discounted + penalty * o.ruin_discounted
                                : o.utility + penalty * o.ruin);
    }
    blocks[b] = s;
  };

  if (workers <= 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) run_block(b);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t b = next.fetch_add(1);
          if (b >= n_blocks) return;
          try {
            run_block(b);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(n_blocks);
            return;
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  const BlockStats total = reduce(blocks, 0, n_blocks);
  SimEstimate e;
  e.ruin_prob = total.f[kRuin].mean;
  e.ruin_se = total.f[kRuin].se();
  e.utility_mean = total.f[kUtil].mean;
  e.utility_se = total.f[kUtil].se();
  e.penalized_value = total.f[kPenalized].mean;
  e.penalized_se = total.f[kPenalized].se();
  e.has_discounted = track;
  if (track) {
    e.ruin_prob_discounted = total.f[kRuinDisc].mean;
    e.ruin_se_discounted = total.f[kRuinDisc].se();
    e.utility_mean_discounted = total.f[kUtilDisc].mean;
    e.utility_se_discounted = total.f[kUtilDisc].se();
  }
  e.n_effective = config.antithetic ? 2 * units : units;
  return e;
}

struct TableSampler {
  const TabulatedPolicy& policy;
  std::size_t cursor = 0;

  TabulatedPolicy::Sample operator()(double x) { return policy.sample(x, cursor); }
};

struct FunctionSampler {
  const FeedbackPolicy& policy;
  const UtilitySpec& utility;
  double last_c = std::numeric_limits<double>::quiet_NaN();
  double last_u = 0.0;

  TabulatedPolicy::Sample operator()(double x) {
    PolicyAction a;
    try {
      a = policy(x);
    } catch (const std::exception& ex) {
      throw NumericalError(std::string("policy evaluation failed: ") + ex.what());
    }
    if (!std::isfinite(a.consumption) || !std::isfinite(a.investment) || a.consumption < 0.0) {
      throw NumericalError("policy returned an invalid action at wealth " + std::to_string(x));
    }
    if (a.consumption != last_c) {
      last_c = a.consumption;
      last_u = u_value(utility, a.consumption);
    }
    return {a.consumption, a.investment, last_u};
  }
};

template <class Sampler, class MakeSampler>
SimEstimate primal_impl(MakeSampler&& make_sampler, double x0, const MarketParams& mk,
                        const SimConfig& config, double penalty) {
  if (!(x0 > 0.0) || !std::isfinite(x0)) throw InvalidInput("x0 must be positive and finite");
  const double t_max = horizon(config, mk.beta);
  validate_config(config, t_max);

  const double h = config.dt;
  const double sqrt_h = std::sqrt(h);
  const double beta = mk.beta;
  const double step_discount = std::exp(-beta * h);
  const double step_weight = -std::expm1(-beta * h) / beta;
  const auto n_steps = static_cast<std::uint64_t>(std::ceil(t_max / h));
  const PhiloxIndexed indexed(config.seed);

  auto path = [&](std::size_t unit, bool mirrored) {
    const auto lane = static_cast<std::uint32_t>(unit);
    const double sign = mirrored ? -1.0 : 1.0;
    PathEngine stream(config.seed, lane, kNormalStream);
    boost::random::normal_distribution<double> normal;
    Sampler sampler = make_sampler();

    double um = indexed.uniform(0, 0, lane, kMortalityStream);
    if (mirrored) um = 1.0 - um;
    const double tau_d = -std::log(um) / beta;
    const std::uint64_t last_step =
        config.track_discounted
            ? n_steps
            : std::min<std::uint64_t>(n_steps, static_cast<std::uint64_t>(std::ceil(tau_d / h)));

    PathOutcome out;
    double x = x0;
    double df = 1.0;  // e^{-beta t}
    for (std::uint64_t k = 0; k < last_step; ++k) {
      const double t = static_cast<double>(k) * h;
      const TabulatedPolicy::Sample s = sampler(x);
      const double xi = sign * normal(stream);
      const double vol = mk.sigma * s.investment;
      const double x_new =
          x + (mk.r * x + (mk.mu - mk.r) * s.investment - s.consumption) * h + vol * sqrt_h * xi;
      if (!std::isfinite(x_new) || !std::isfinite(s.utility)) {
        throw NumericalError("non-finite state in primal simulation at t = " + std::to_string(t));
      }

      double seg = h;
      bool crossed = false;
      if (x_new <= 0.0) {
        crossed = true;
        seg = h * x / (x - x_new);
      } else if (config.bridge_correction && vol != 0.0) {
        const double expo = -2.0 * x * x_new / (vol * vol * h);
        if (expo > kBridgeCutoff) {
          double ub = indexed.uniform(static_cast<std::uint32_t>(k),
                                      static_cast<std::uint32_t>(k >> 32), lane, kBridgeStream);
          if (mirrored) ub = 1.0 - ub;
          if (ub < std::exp(expo)) {
            crossed = true;
            seg = 0.5 * h;
          }
        }
      }

      if (t < tau_d) out.utility += s.utility * std::min(seg, tau_d - t);
      if (config.track_discounted) {
        const double w = seg == h ? step_weight : -std::expm1(-beta * seg) / beta;
        out.utility_discounted += s.utility * df * w;
      }
      if (crossed) {
        const double tau0 = t + seg;
        out.ruin = tau0 < tau_d ? 1.0 : 0.0;
        out.ruin_discounted = df * std::exp(-beta * seg);
        break;
      }
      x = x_new;
      df *= step_discount;
    }
    return out;
  };
  SimEstimate e = run_paths(config, penalty, path);
  e.has_utility = true;
  return e;
}

}  // namespace

double default_horizon(double beta) {
  if (!(beta > 0.0)) throw InvalidInput("beta must be positive");
  return std::log(1e6) / beta;
}

unsigned resolve_threads(const SimConfig& config) {
  unsigned n = config.threads;
  if (n == 0) {
    if (const char* env = std::getenv("RUINBOUND_THREADS")) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

// ---------------------------------------------------------------------------
// TabulatedPolicy

TabulatedPolicy::TabulatedPolicy(const PolicySolution& solution, double x_ref, std::size_t nodes,
                                 double investment_scale)
    : solution_(solution), scale_(investment_scale) {
  if (!(x_ref > 0.0) || !std::isfinite(x_ref)) throw InvalidInput("x_ref must be positive");
  if (nodes < 16) throw InvalidInput("policy table needs at least 16 nodes");
  const Model& m = solution_.model();
  const DualCoefficients& k = solution_.coefficients();

  const bool bounded = std::isfinite(k.y_bar);
  const double y_top = bounded ? k.y_bar : solution_.marginal_value(x_ref * 1e-8);
  const double y_bot = solution_.marginal_value(x_ref * 1e12);
  const double log_top = std::log(y_top);
  const double step = (log_top - std::log(y_bot)) / static_cast<double>(nodes - 1);

  x_.reserve(nodes + 1);
  if (!bounded) {
    // Case i: wealth 0 is reached only asymptotically, where c and pi vanish.
    x_.push_back(0.0);
    c_.push_back(0.0);
    pi_.push_back(0.0);
    u_.push_back(u_at_zero(m.utility));
  }
  for (std::size_t i = 0; i < nodes; ++i) {
    const double y = i == 0 ? y_top : std::exp(log_top - step * static_cast<double>(i));
    double x = dual_wealth(m, y, k.floor, k.wealth_coef);
    if (bounded && i == 0) x = 0.0;
    if (!x_.empty() && !(x > x_.back())) continue;
    const PolicyAction a = solution_.policy_at_dual(y);
    x_.push_back(x);
    c_.push_back(a.consumption);
    pi_.push_back(a.investment);
    u_.push_back(u_value(m.utility, a.consumption));
  }
}

TabulatedPolicy::Sample TabulatedPolicy::exact(double x) const {
  const PolicyAction a = solution_.policy(x);
  return {a.consumption, scale_ * a.investment, u_value(solution_.model().utility, a.consumption)};
}

TabulatedPolicy::Sample TabulatedPolicy::sample(double x, std::size_t& cursor) const {
  const std::size_t n = x_.size();
  if (x >= x_[n - 1]) return exact(x);
  if (x <= x_[0]) return {c_[0], scale_ * pi_[0], u_[0]};
  std::size_t i = std::min(cursor, n - 2);
  // Walk a few nodes from the hint, then fall back to bisection.
  int walk = 0;
  while (walk < 8 && x < x_[i]) {
    --i;
    ++walk;
  }
  while (walk < 8 && x >= x_[i + 1]) {
    ++i;
    ++walk;
  }
  if (x < x_[i] || x >= x_[i + 1]) {
    i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  }
  cursor = i;
  const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
  return {c_[i] + w * (c_[i + 1] - c_[i]), scale_ * (pi_[i] + w * (pi_[i + 1] - pi_[i])),
          u_[i] + w * (u_[i + 1] - u_[i])};
}

TabulatedPolicy::Sample TabulatedPolicy::sample(double x) const {
  std::size_t cursor = 0;
  return sample(x, cursor);
}

// ---------------------------------------------------------------------------
// Simulation entry points

SimEstimate simulate_primal(const FeedbackPolicy& policy, const UtilitySpec& utility, double x0,
                            const MarketParams& market, const SimConfig& config, double penalty) {
  if (!policy) throw InvalidInput("policy is empty");
  const MarketParams mk = validate_params(market);
  return primal_impl<FunctionSampler>([&] { return FunctionSampler{policy, utility}; }, x0, mk,
                                      config, penalty);
}

SimEstimate simulate_primal(const TabulatedPolicy& policy, double x0, const SimConfig& config,
                            double penalty) {
  return primal_impl<TableSampler>([&] { return TableSampler{policy}; }, x0,
                                   policy.solution().model().market, config, penalty);
}

SimEstimate simulate_dual(double y0, double y_bar, const MarketParams& market,
                          const RootSet& roots, const SimConfig& config) {
  const MarketParams mk = validate_params(market);
  if (!(y0 > 0.0) || !std::isfinite(y_bar) || !(y0 < y_bar)) {
    throw InvalidInput("simulate_dual requires 0 < y0 < y_bar < inf");
  }
  const double t_max = horizon(config, mk.beta);
  validate_config(config, t_max);

  const int levels = config.refine_levels;
  const std::uint32_t fine = 1u << levels;
  const double dt = config.dt;
  const double h = dt / fine;
  const double beta = mk.beta;
  const double drift = (mk.beta - mk.r - roots.gamma) * h;  // log-drift per fine step
  const double vol = std::sqrt(2.0 * roots.gamma);
  const double bridge_scale = 2.0 / (vol * vol * h);
  const double l0 = std::log(y0 / y_bar);
  const auto n_steps = static_cast<std::uint64_t>(std::ceil(t_max / dt));
  const PhiloxIndexed indexed(config.seed);
  const std::uint32_t bridge_stream = kBridgeStream | (static_cast<std::uint32_t>(levels) << 8);
  const double sqrt_dt = std::sqrt(dt);

  auto path = [&](std::size_t unit, bool mirrored) {
    const auto lane = static_cast<std::uint32_t>(unit);
    const double sign = mirrored ? -1.0 : 1.0;
    PathEngine stream(config.seed, lane, kNormalStream);
    boost::random::normal_distribution<double> normal;
    std::vector<double> bm(fine + 1, 0.0);  // Brownian path within one coarse step

    double um = indexed.uniform(0, 0, lane, kMortalityStream);
    if (mirrored) um = 1.0 - um;
    const double tau_d = -std::log(um) / beta;
    const std::uint64_t last_step =
        config.track_discounted
            ? n_steps
            : std::min<std::uint64_t>(n_steps, static_cast<std::uint64_t>(std::ceil(tau_d / dt)));

    PathOutcome out;
    double l = l0;
    for (std::uint64_t k = 0; k < last_step; ++k) {
      bm[fine] = sqrt_dt * sign * normal(stream);
      for (int lev = 1; lev <= levels; ++lev) {
        const std::uint32_t stride = fine >> lev;
        const double sd = std::sqrt(stride * h * 0.5);
        for (std::uint32_t j = 1; j < (1u << lev); j += 2) {
          const std::uint32_t i = j * stride;
          const double eta = indexed.normal(static_cast<std::uint32_t>(k), j, lane,
                                            kRefineStream | (static_cast<std::uint32_t>(lev) << 8));
          bm[i] = 0.5 * (bm[i - stride] + bm[i + stride]) + sd * sign * eta;
        }
      }
      for (std::uint32_t j = 0; j < fine; ++j) {
        const double l_new = l + drift - vol * (bm[j + 1] - bm[j]);
        double frac = -1.0;
        if (l_new >= 0.0) {
          frac = -l / (l_new - l);
        } else {
          const double expo = -bridge_scale * l * l_new;
          if (expo > kBridgeCutoff) {
            const std::uint64_t f = k * fine + j;
            double ub = indexed.uniform(static_cast<std::uint32_t>(f),
                                        static_cast<std::uint32_t>(f >> 32), lane, bridge_stream);
            if (mirrored) ub = 1.0 - ub;
            if (ub < std::exp(expo)) frac = 0.5;
          }
        }
        if (frac >= 0.0) {
          const double tau = (static_cast<double>(k * fine + j) + frac) * h;
          out.ruin = tau < tau_d ? 1.0 : 0.0;
          out.ruin_discounted = std::exp(-beta * tau);
          return out;
        }
        l = l_new;
      }
    }
    return out;
  };
  return run_paths(config, 0.0, path);
}

}  // namespace ruinbound
