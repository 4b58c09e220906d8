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

#ifndef ETRL_LEARNERS_HPP
#define ETRL_LEARNERS_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "etrl/policies.hpp"

namespace etrl {

// TD machinery. The average reward is held per second.

/// delta = r - jbar * dwell + V(s') - V(s)
inline double td_error_v(double reward, double jbar_per_s, double dwell_s, double v_next,
                         double v_now) {
  return reward - jbar_per_s * dwell_s + v_next - v_now;
}

/// delta = r - jbar * dwell + Q(s', mu(s')) - Q(s, a)
inline double td_error_q(double reward, double jbar_per_s, double dwell_s, double q_next,
                         double q_now) {
  return reward - jbar_per_s * dwell_s + q_next - q_now;
}

/// jbar <- jbar + alpha_j * delta / dwell
inline double update_average_reward(double jbar_per_s, double alpha_j, double delta,
                                    double dwell_s) {
  return jbar_per_s + alpha_j * delta / dwell_s;
}

/// Zero-mean Gaussian exploration with per-update geometric decay of the
/// standard deviation.
struct ExplorationConfig {
  double std0_c = 1.0;
  double decay = 0.999;

  double stddev(std::uint64_t k) const;
  bool operator==(const ExplorationConfig&) const = default;
};

struct TrainConfig {
  double alpha_j = 0.2;
  double alpha_v = 0.05;
  double alpha_w = 0.05;
  double alpha_theta = 0.02;
  double lambda_v = 0.5;
  double lambda_theta = 0.5;
  ExplorationConfig exploration;
  double init_theta_on_c = 11.0;
  double init_theta_off_c = 19.0;
  double init_sigma_c = 1.0;
  // The Gaussian policy's std is projected onto [sigma_min, sigma_max] after
  // each actor update.
  double sigma_min_c = 0.05;
  double sigma_max_c = 3.0;
  bool per_mode_sigma = false;
  FeatureConfig features;
  double duration_days = 10.0;
  std::uint64_t seed = 1;
  // Divergence guard on threshold parameters.
  double theta_min_c = -50.0;
  double theta_max_c = 80.0;

  void validate() const;
  double duration_s() const { return duration_days * 86400.0; }
  /// Initial threshold weights: [on, off] followed by zeros for extra features.
  VectorXd initial_theta() const;
  bool operator==(const TrainConfig&) const = default;
};

/// One parameter update (an event, or a tick for the time-triggered learner),
/// logged with the parameters after the update.
struct UpdateRecord {
  std::uint64_t k = 0;
  double t_s = 0.0;  // time of s'
  double dwell_s = 0.0;
  double raw_action_c = 0.0;
  double action_c = 0.0;  // executed (clamped) threshold
  bool heater_on = false; // heater status of s
  bool timeout = false;
  double reward = 0.0;
  double delta = 0.0;
  double jbar_per_s = 0.0;
  VectorXd theta;
  VectorXd log_std;  // empty for deterministic learners
  VectorXd v;
  VectorXd w;        // empty for the stochastic learner
};

struct TrainResult {
  std::vector<UpdateRecord> history;
  EventTrace trace;
  SavedParams final_params;
  double total_reward = 0.0;
  double total_time_s = 0.0;
};

/// Event-triggered actor-critic with a Gaussian threshold policy and
/// eligibility traces.
TrainResult train_stochastic(const Environment& env, const TrainConfig& cfg);

/// Event-triggered compatible off-policy deterministic actor-critic with a
/// Q-learning critic.
TrainResult train_deterministic(const Environment& env, const TrainConfig& cfg);

enum class FixedIntervalMode {
  FixedControl,  // thresholds compared only at ticks
  EventControl,  // heater switches at the exact crossing inside a tick
};

/// Time-triggered counterpart of train_deterministic: one update per tick with
/// dwell equal to the tick length.
TrainResult train_fixed_interval(const Environment& env, const TrainConfig& cfg, double tick_s,
                                 FixedIntervalMode mode = FixedIntervalMode::FixedControl);
/// Same, over an explicit sequence of tick lengths (training stops after the last).
TrainResult train_fixed_interval(const Environment& env, const TrainConfig& cfg,
                                 std::span<const double> ticks, FixedIntervalMode mode);

inline constexpr std::string_view kTrainingLogHeader =
    "k,t_s,dwell_s,action_C,reward,delta,jbar_per_hr,theta_on,theta_off,theta_sigma";

void write_training_log(std::ostream& out, const std::vector<UpdateRecord>& history);

/// Standard deviation of the piecewise-constant average-reward estimate
/// (unit/hr) sampled every `sample_dt_s` over [t_from_s, t_to_s].
double jbar_trace_std(const std::vector<UpdateRecord>& history, double t_from_s, double t_to_s,
                      double sample_dt_s = 300.0);

}  // namespace etrl

#endif  // ETRL_LEARNERS_HPP
