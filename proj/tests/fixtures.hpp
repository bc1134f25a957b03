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

// The five reference instances, one per dual case, on the market M0.

#pragma once

#include <string>
#include <vector>

#include "ruinbound/dual.hpp"

namespace fixtures {

inline const ruinbound::MarketParams kM0{0.02, 0.06, 0.2, 0.04};

struct Instance {
  std::string label;
  ruinbound::Model model;
  double penalty;
  double wealth;
  ruinbound::DualCase expected;
};

inline std::vector<Instance> case_instances() {
  using namespace ruinbound;
  const Model merton = make_model(kM0, UtilitySpec::power(0.5));
  const Model power2 = make_model(kM0, UtilitySpec::power(2.0));
  const Model shifted = make_model(kM0, UtilitySpec::shifted_power(2.0, 1.0, 0.2));
  return {{"i", merton, 0.0, 10.0, DualCase::kI},
          {"ii", power2, -1.0, 10.0, DualCase::kII},
          {"iii", shifted, -3.0, 1.0, DualCase::kIII},
          {"iv", shifted, critical_penalty(shifted), 1.0, DualCase::kIV},
          {"v", shifted, -1.0, 1.0, DualCase::kV}};
}

inline ruinbound::PolicySolution solve(const Instance& inst) {
  return ruinbound::PolicySolution(inst.model, ruinbound::select_case(inst.model, inst.penalty));
}

}  // namespace fixtures
