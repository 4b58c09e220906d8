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

#ifndef ETRL_SIMULATOR_HPP
#define ETRL_SIMULATOR_HPP

#include <functional>

#include "etrl/reward.hpp"
#include "etrl/thermal.hpp"

namespace etrl {

struct SimOptions {
  double step_s = 10.0;            // integration / quadrature grid
  double event_tol_s = 0.1;        // bisection time tolerance
  double event_temp_tol_c = 1e-3;  // bisection temperature tolerance
  double max_dwell_s = 86400.0;    // timeout without switching
  double min_dwell_s = 1.0;
  bool force_numeric = false;      // use stepping even for constant weather
  // When positive, thresholds are only compared at absolute times that are
  // multiples of this tick (time-triggered control execution).
  double control_tick_s = 0.0;

  void validate() const;
};

enum class SwitchKind { SwitchOn, SwitchOff };

/// Heater OFF waits for a switch-ON threshold and vice versa.
inline SwitchKind pending_switch(bool heater_on) {
  return heater_on ? SwitchKind::SwitchOff : SwitchKind::SwitchOn;
}

struct ThresholdAction {
  double value_c = 0.0;
  SwitchKind kind = SwitchKind::SwitchOn;
};

/// One SMDP sample: the unit of learning.
struct Transition {
  SystemState s;
  ThresholdAction a;
  double reward = 0.0;
  double dwell_s = 0.0;
  SystemState s_next;
  bool timeout = false;
};

/// Receives every quadrature node of a dwell (dense trajectory output).
using SampleSink = std::function<void(const SystemState&)>;

/// Holds the heater status of `s` until the indoor temperature reaches the
/// threshold `a`, then switches. Constant weather uses the exact crossing time;
/// otherwise the trajectory is stepped with frozen-per-step outdoor temperature
/// and the crossing is refined by bisection.
Transition step_to_event(const BuildingParams& bp, const WeatherModel& weather, const SystemState& s,
                         const ThresholdAction& a, const RewardWeights& rw, const SimOptions& opts,
                         const SampleSink& sink = {});

}  // namespace etrl

#endif  // ETRL_SIMULATOR_HPP
