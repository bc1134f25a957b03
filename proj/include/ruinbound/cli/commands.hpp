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

#include <iosfwd>
#include <string>
#include <string_view>

#include "ruinbound/cli/config.hpp"

namespace ruinbound::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidInput = 1,
  kExitModel = 2,
  kExitNumerical = 3,
  kExitCheckFailed = 4,
};

/// Runs one of solve, policy, frontier, simulate or check. The artifact goes
/// to config.out_path when set, otherwise to `out`; diagnostics go to `err`.
/// Never throws; failures map to the exit codes above.
int run(std::string_view command, const RunConfig& config, std::ostream& out, std::ostream& err);

/// Renders the artifact of a command as text. Throws ruinbound::Error.
std::string render(std::string_view command, const RunConfig& config, int& status);

}  // namespace ruinbound::cli
