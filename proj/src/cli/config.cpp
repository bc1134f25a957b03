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

#include "ruinbound/cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "ruinbound/errors.hpp"

namespace ruinbound::cli {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw InvalidInput("config key '" + std::string(key) + "': expected a finite number, got '" +
                       std::string(v) + "'");
  }
  return out;
}

std::uint64_t to_unsigned(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InvalidInput("config key '" + std::string(key) + "': expected a non-negative integer, got '" +
                       std::string(v) + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidInput("config key '" + std::string(key) + "': expected true or false");
}

void require(bool ok, const std::string& message) {
  if (!ok) throw InvalidInput(message);
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto num = [&t](const char* name, double RunConfig::*field) {
      t[name] = [field](RunConfig& c, std::string_view k, std::string_view v) {
        c.*field = to_double(k, v);
      };
    };
    auto market = [&t](const char* name, double MarketParams::*field) {
      t[name] = [field](RunConfig& c, std::string_view k, std::string_view v) {
        c.market.*field = to_double(k, v);
      };
    };
    market("r", &MarketParams::r);
    market("mu", &MarketParams::mu);
    market("sigma", &MarketParams::sigma);
    market("beta", &MarketParams::beta);
    t["utility.kind"] = [](RunConfig& c, std::string_view, std::string_view v) {
      c.utility_kind = std::string(v);
    };
    num("utility.p", &RunConfig::utility_p);
    num("utility.eta", &RunConfig::utility_eta);
    num("utility.K", &RunConfig::utility_offset);
    num("utility.u_anchor", &RunConfig::u_anchor);
    t["utility.grid_file"] = [](RunConfig& c, std::string_view, std::string_view v) {
      c.grid_file = std::string(v);
    };
    num("wealth", &RunConfig::wealth);
    t["phi"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.phi = to_double(k, v); };
    t["penalty"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      if (v == "pstar") {
        c.penalty_critical = true;
      } else {
        c.penalty = to_double(k, v);
      }
    };
    t["strict"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.strict = to_bool(k, v); };
    num("tol_phi", &RunConfig::tol_phi);
    num("tol_root", &RunConfig::tol_root);
    t["max_iter"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      const auto n = to_unsigned(k, v);
      require(n >= 1 && n <= 100000, "max_iter must lie in [1, 100000]");
      c.max_iter = static_cast<int>(n);
    };
    t["seed"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.sim.seed = to_unsigned(k, v); };
    t["n_paths"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.sim.n_paths = to_unsigned(k, v);
    };
    t["dt"] = [](RunConfig& c, std::string_view k, std::string_view v) { c.sim.dt = to_double(k, v); };
    t["t_max"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.sim.t_max = to_double(k, v);
      require(c.sim.t_max > 0.0, "t_max must be positive");
    };
    t["antithetic"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.sim.antithetic = to_bool(k, v);
    };
    t["track_discounted"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.sim.track_discounted = to_bool(k, v);
    };
    t["bridge_correction"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.sim.bridge_correction = to_bool(k, v);
    };
    t["refine_levels"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.sim.refine_levels = static_cast<int>(std::min<std::uint64_t>(to_unsigned(k, v), 1000));
    };
    t["simulate_dual"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.simulate_dual = to_bool(k, v);
    };
    t["format"] = [](RunConfig& c, std::string_view, std::string_view v) { c.format = parse_format(v); };
    t["out_path"] = [](RunConfig& c, std::string_view, std::string_view v) { c.out_path = std::string(v); };
    t["grid.n"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.grid_points = to_unsigned(k, v);
    };
    num("grid.lo", &RunConfig::grid_lo_factor);
    num("grid.hi", &RunConfig::grid_hi_factor);
    t["frontier.n"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.frontier_points = to_unsigned(k, v);
    };
    t["frontier.p_min"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.frontier_p_min = to_double(k, v);
    };
    t["frontier.p_max"] = [](RunConfig& c, std::string_view k, std::string_view v) {
      c.frontier_p_max = to_double(k, v);
    };
    return t;
  }();
  return table;
}

void validate(const RunConfig& c, const std::set<std::string, std::less<>>& seen) {
  for (const char* key : {"r", "mu", "sigma", "beta", "utility.kind", "wealth"}) {
    require(seen.count(key) > 0, std::string("missing required config key '") + key + "'");
  }
  validate_params(c.market);
  const std::string& kind = c.utility_kind;
  require(kind == "power" || kind == "log" || kind == "shifted_power" || kind == "tabulated",
          "utility.kind must be power, log, shifted_power or tabulated");
  if (kind == "power" || kind == "shifted_power") {
    require(seen.count("utility.p") > 0, "utility.p is required for utility.kind = " + kind);
  }
  if (kind == "tabulated") {
    require(seen.count("utility.grid_file") > 0, "utility.grid_file is required for tabulated utility");
  }
  require(c.wealth > 0.0, "wealth must be positive");
  if (c.phi) require(*c.phi >= 0.0 && *c.phi <= 1.0, "phi must lie in [0, 1]");
  require(!(c.penalty && c.penalty_critical), "penalty given twice");
  require(!(c.phi && (c.penalty || c.penalty_critical)), "give either phi or penalty, not both");
  require(c.tol_phi > 0.0, "tol_phi must be positive");
  require(c.tol_root > 0.0 && c.tol_root < 1e-3, "tol_root must lie in (0, 1e-3)");
  require(c.sim.n_paths >= 1, "n_paths must be >= 1");
  require(c.sim.dt > 0.0, "dt must be positive");
  require(c.sim.refine_levels <= 16, "refine_levels must be <= 16");
  require(c.grid_points >= 2, "grid.n must be >= 2");
  require(c.grid_lo_factor > 0.0 && c.grid_lo_factor < c.grid_hi_factor,
          "grid.lo and grid.hi must satisfy 0 < lo < hi");
  require(c.frontier_points >= 2, "frontier.n must be >= 2");
  if (c.frontier_p_min && c.frontier_p_max) {
    require(*c.frontier_p_min < *c.frontier_p_max, "frontier.p_min must be below frontier.p_max");
  }
}

}  // namespace

OutputFormat parse_format(std::string_view text) {
  if (text == "json") return OutputFormat::kJson;
  if (text == "csv") return OutputFormat::kCsv;
  throw InvalidInput("format must be json or csv");
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  RunConfig c;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InvalidInput("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw InvalidInput("config line " + std::to_string(line_no) + ": empty key or value");
    }
    const auto it = setters().find(key);
    if (it == setters().end()) throw InvalidInput("unknown config key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second) {
      throw InvalidInput("duplicate config key '" + std::string(key) + "'");
    }
    it->second(c, key, value);
  }
  validate(c, seen);
  if (!c.grid_file.empty() && c.grid_file.is_relative() && !base_dir.empty()) {
    c.grid_file = base_dir / c.grid_file;
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

UtilitySpec build_utility(const RunConfig& c) {
  if (c.utility_kind == "power") return UtilitySpec::power(c.utility_p);
  if (c.utility_kind == "log") return UtilitySpec::log();
  if (c.utility_kind == "shifted_power") {
    return UtilitySpec::shifted_power(c.utility_p, c.utility_eta, c.utility_offset);
  }
  if (c.utility_kind == "tabulated") {
    std::ifstream in(c.grid_file);
    if (!in) throw InvalidInput("cannot read utility grid file " + c.grid_file.string());
    std::vector<double> theta;
    std::vector<double> marginal;
    std::string line;
    bool header_allowed = true;
    while (std::getline(in, line)) {
      std::string_view s = line;
      if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
      s = trim(s);
      if (s.empty()) continue;
      const auto comma = s.find(',');
      if (comma == std::string_view::npos) throw InvalidInput("utility grid: expected theta,marginal");
      const std::string_view a = trim(s.substr(0, comma));
      const std::string_view b = trim(s.substr(comma + 1));
      if (header_allowed && a == "theta") {
        header_allowed = false;
        continue;
      }
      header_allowed = false;
      theta.push_back(to_double("utility grid theta", a));
      marginal.push_back(to_double("utility grid marginal", b));
    }
    return UtilitySpec::tabulated(theta, marginal, c.u_anchor);
  }
  throw InvalidInput("unknown utility.kind " + c.utility_kind);
}

Model build_model(const RunConfig& c) { return make_model(c.market, build_utility(c)); }

SolverTolerances solver_tolerances(const RunConfig& c) {
  SolverTolerances t;
  t.root_rel = c.tol_root;
  t.inversion_rel = c.tol_root;
  return t;
}

}  // namespace ruinbound::cli
