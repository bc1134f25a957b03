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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "ruinbound/dual.hpp"
#include "ruinbound/montecarlo.hpp"

namespace ruinbound::cli {

enum class OutputFormat { kJson, kCsv };

/// Everything a single command invocation needs. Parsed from a text file of
/// `key = value` lines; `#` starts a comment.
struct RunConfig {
  MarketParams market;

  std::string utility_kind;  ///< power, log, shifted_power or tabulated
  double utility_p = 0.0;
  double utility_eta = 1.0;
  double utility_offset = 0.0;
  std::filesystem::path grid_file;  ///< resolved against the config's directory
  double u_anchor = 0.0;

  double wealth = 0.0;
  std::optional<double> phi;
  /// Fixed penalty instead of calibration. Set by `penalty = <number>`.
  std::optional<double> penalty;
  /// `penalty = pstar` selects the critical penalty of the utility.
  bool penalty_critical = false;
  bool strict = false;

  double tol_phi = 1e-6;
  double tol_root = 1e-12;
  int max_iter = 200;

  SimConfig sim;
  bool simulate_dual = true;

  OutputFormat format = OutputFormat::kJson;
  std::filesystem::path out_path;

  std::size_t grid_points = 101;
  double grid_lo_factor = 0.01;  ///< policy grid spans [wealth * lo, wealth * hi]
  double grid_hi_factor = 100.0;

  std::size_t frontier_points = 50;
  std::optional<double> frontier_p_min;
  std::optional<double> frontier_p_max;
};

/// Parses config text. Relative grid_file paths resolve against base_dir.
/// Throws InvalidInput on syntax errors, unknown or duplicate keys, missing
/// required keys and values that violate module preconditions.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

RunConfig load_config(const std::filesystem::path& path);

OutputFormat parse_format(std::string_view text);

/// Builds the utility described by the config (reads grid_file if tabulated).
UtilitySpec build_utility(const RunConfig& config);

Model build_model(const RunConfig& config);

SolverTolerances solver_tolerances(const RunConfig& config);

}  // namespace ruinbound::cli
