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

#ifndef ETRL_SMDP_HPP
#define ETRL_SMDP_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "etrl/simulator.hpp"

namespace etrl {

using Rng = std::mt19937_64;

/// Feasible threshold band plus the minimum hysteresis between an event
/// temperature and the next (opposite) threshold.
struct ClampConfig {
  double band_lo_c = -8.0;
  double band_hi_c = 28.0;
  double gap_c = 0.1;

  /// Band [T_out_min + margin, T_out_max + Q_h/K - margin].
  static ClampConfig from_model(const BuildingParams& bp, const WeatherModel& weather,
                                double margin_c = 2.0, double gap_c = 0.1);
};

/// Pulls a raw policy output onto the reachable side of the current
/// temperature (by at least the gap), then into the band. The band wins when
/// the two conflict; such a threshold is already satisfied and produces a
/// minimum-dwell switch.
ThresholdAction clamp_action(double raw_c, const SystemState& s, const ClampConfig& cfg);

/// Everything needed to roll out the closed loop.
struct Environment {
  BuildingParams building;
  WeatherModel weather;
  RewardWeights rewards;
  SimOptions sim;
  ClampConfig clamp;
  SystemState initial;

  /// Builds an environment whose clamp band follows the weather extremes and
  /// whose initial state sits at `t_in0_c` with the heater off at t = 0.
  static Environment make(const BuildingParams& bp, WeatherModel weather, const RewardWeights& rw,
                          const SimOptions& sim = {}, double t_in0_c = 15.0, double margin_c = 2.0,
                          double gap_c = 0.1);

  void validate() const;
};

/// Stateful closed loop: holds the current system state and advances it one
/// event at a time.
class Plant {
 public:
  explicit Plant(const Environment& env) : env_(&env), state_(env.initial) {}

  const SystemState& state() const { return state_; }
  const Environment& env() const { return *env_; }

  /// Clamps `raw_threshold_c`, runs to the next event and moves the state.
  Transition advance(double raw_threshold_c, const SampleSink& sink = {});

 private:
  const Environment* env_;
  SystemState state_;
};

enum class TraceFlag : int { Sample = 0, Switch = 1, Timeout = 2 };

struct TraceRecord {
  double t_s = 0.0;
  double t_in_c = 0.0;
  double t_out_c = 0.0;
  bool heater_on = false;
  TraceFlag flag = TraceFlag::Switch;
  double action_c = 0.0;
  double step_reward = 0.0;
  double cum_reward = 0.0;
  double avg_reward_per_hr = 0.0;
};

inline constexpr std::string_view kEventTraceHeader =
    "t_s,T_in_C,T_out_C,heater_on,event,action_C,step_reward,cum_reward,avg_reward_est";

class EventTrace {
 public:
  /// Appends the post-event state of `tr`; cumulative reward is maintained here.
  void record_transition(const Transition& tr, double avg_reward_per_hr);
  /// Appends a dense trajectory sample (event flag 0, empty action/reward).
  void record_sample(const SystemState& s);

  const std::vector<TraceRecord>& records() const { return records_; }
  double cumulative_reward() const { return cum_; }

  void write_csv(std::ostream& out) const;

 private:
  std::vector<TraceRecord> records_;
  double cum_ = 0.0;
};

/// Maps a state to a raw (unclamped) threshold.
using Policy = std::function<double(const SystemState&, Rng&)>;

struct RolloutOptions {
  bool dense = false;  // also record every quadrature node
};

struct RolloutResult {
  EventTrace trace;
  std::vector<Transition> transitions;
  double total_reward = 0.0;
  double total_time_s = 0.0;
  double avg_reward_per_hr = 0.0;
};

/// Closed-loop rollout until simulated time reaches `duration_s`; the average
/// reward is sum(r) / sum(dwell), reported per hour.
RolloutResult run_policy(const Environment& env, const Policy& policy, double duration_s,
                         std::uint64_t seed, const RolloutOptions& opts = {});

/// Shortest round-trip decimal representation.
std::string format_double(double v);

}  // namespace etrl

#endif  // ETRL_SMDP_HPP
