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

#ifndef ETRL_REWARD_HPP
#define ETRL_REWARD_HPP

#include <span>

namespace etrl {

inline constexpr double kSecondsPerHour = 3600.0;

/// Penalty weights. Rates are per second; all are non-positive.
struct RewardWeights {
  double switch_penalty = -0.8;                            // unit per switch
  double energy_rate = -1.2 / kSecondsPerHour;             // unit / s while heating
  double comfort_rate = -1.2 / kSecondsPerHour;            // unit / (K^2 s)
  double desired_temperature_c = 15.0;

  void validate() const;
};

struct TrajectorySample {
  double t_s;
  double t_in_c;
};

/// Instantaneous reward rate (unit/s) excluding the switching impulse.
inline double reward_rate(const RewardWeights& rw, double t_in_c, bool heater_on) {
  const double dev = t_in_c - rw.desired_temperature_c;
  return (heater_on ? rw.energy_rate : 0.0) + rw.comfort_rate * dev * dev;
}

/// Reward accumulated over one dwell with constant heater status: trapezoidal
/// quadrature of the rate over `segment`, plus the switching penalty when the
/// dwell ends in a switch. Fewer than two samples integrate to zero.
double accumulate_reward(std::span<const TrajectorySample> segment, bool heater_on,
                         const RewardWeights& rw, bool ends_in_switch);

}  // namespace etrl

#endif  // ETRL_REWARD_HPP
