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

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ruinbound/cli/commands.hpp"
#include "ruinbound/errors.hpp"

int main(int argc, char** argv) {
  namespace rc = ruinbound::cli;

  CLI::App app{"Lifetime ruin-constrained consumption and investment"};
  std::string command;
  std::string config_path;
  std::optional<std::string> out_path;
  std::optional<std::string> format;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "solve, policy, frontier, simulate or check")
      ->required()
      ->check(CLI::IsMember({"solve", "policy", "frontier", "simulate", "check"}));
  app.add_option("--config", config_path, "key = value config file")->required();
  app.add_option("--out", out_path, "write the artifact here instead of stdout");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed, "simulation seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return rc::kExitInvalidInput;
  }

  rc::RunConfig config;
  try {
    config = rc::load_config(config_path);
    if (out_path) config.out_path = *out_path;
    if (format) config.format = rc::parse_format(*format);
    if (seed) config.sim.seed = *seed;
  } catch (const ruinbound::Error& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return rc::kExitInvalidInput;
  }
  return rc::run(command, config, std::cout, std::cerr);
}
