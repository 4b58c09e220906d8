// Copyright 2026 The etrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "etrl/reward.hpp"

#include <cmath>

#include "etrl/thermal.hpp"

namespace etrl {

void RewardWeights::validate() const {
  if (switch_penalty > 0.0 || energy_rate > 0.0 || comfort_rate > 0.0) {
    throw InputError("reward weights are penalties and must be non-positive");
  }
  if (!std::isfinite(switch_penalty) || !std::isfinite(energy_rate) ||
      !std::isfinite(comfort_rate) || !std::isfinite(desired_temperature_c)) {
    throw InputError("reward weights must be finite");
  }
}

double accumulate_reward(std::span<const TrajectorySample> segment, bool heater_on,
                         const RewardWeights& rw, bool ends_in_switch) {
  double total = 0.0;
  for (std::size_t i = 1; i < segment.size(); ++i) {
    const double dt = segment[i].t_s - segment[i - 1].t_s;
    total += 0.5 * dt *
             (reward_rate(rw, segment[i - 1].t_in_c, heater_on) +
              reward_rate(rw, segment[i].t_in_c, heater_on));
  }
  return total + (ends_in_switch ? rw.switch_penalty : 0.0);
}

}  // namespace etrl
