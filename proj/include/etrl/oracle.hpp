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

#ifndef ETRL_ORACLE_HPP
#define ETRL_ORACLE_HPP

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "etrl/smdp.hpp"

namespace etrl {

/// Steady hysteresis cycle between constant thresholds under constant weather.
struct LimitCycle {
  double t_on_s = 0.0;   // heating from T_ON to T_OFF
  double t_off_s = 0.0;  // cooling from T_OFF to T_ON
  double cycle_reward = 0.0;
  double j_per_hr = 0.0;

  double period_s() const { return t_on_s + t_off_s; }
};

/// Closed-form average reward of the (T_ON, T_OFF) limit cycle: per-cycle
/// reward (two switches, heater energy, exact comfort integrals of the
/// exponential trajectories) over the cycle period.
/// Throws DomainError unless T_out < T_ON, T_ON + gap <= T_OFF and
/// T_OFF < T_out + Q_h/K.
LimitCycle limit_cycle(const BuildingParams& bp, const RewardWeights& rw, double t_out_c,
                       double t_on_c, double t_off_c, double gap_c = 0.1);

inline double limit_cycle_average_reward(const BuildingParams& bp, const RewardWeights& rw,
                                         double t_out_c, double t_on_c, double t_off_c,
                                         double gap_c = 0.1) {
  return limit_cycle(bp, rw, t_out_c, t_on_c, t_off_c, gap_c).j_per_hr;
}

struct GridSpec {
  double on_lo_c = 8.0;
  double on_hi_c = 15.0;
  double off_lo_c = 15.0;
  double off_hi_c = 22.0;
  double step_c = 0.5;
  double gap_c = 0.1;

  void validate() const;
  std::vector<double> on_values() const;
  std::vector<double> off_values() const;
  bool operator==(const GridSpec&) const = default;
};

struct SurfaceCell {
  double t_on_c = 0.0;
  double t_off_c = 0.0;
  std::optional<double> j_per_hr;  // empty when the pair is infeasible
};

struct RewardSurface {
  std::vector<SurfaceCell> cells;  // lexicographic (t_on, t_off) order
  double argmax_on_c = 0.0;
  double argmax_off_c = 0.0;
  double j_max_per_hr = 0.0;

  /// Value of the cell at (t_on, t_off), if evaluated.
  std::optional<double> at(double t_on_c, double t_off_c) const;
};

/// Analytic surface for constant weather.
RewardSurface grid_search_analytic(const BuildingParams& bp, const RewardWeights& rw,
                                   double t_out_c, const GridSpec& spec);

/// Simulated surface: each pair is rolled out for `eval_days` under `env`.
/// Cells run concurrently; results do not depend on scheduling.
RewardSurface grid_search_simulated(const Environment& env, const GridSpec& spec, double eval_days);

/// Analytic for constant weather, simulated otherwise.
RewardSurface grid_search(const Environment& env, const GridSpec& spec, double eval_days);

inline constexpr std::string_view kSurfaceHeader = "t_on_C,t_off_C,j_per_hr";

void write_surface_csv(std::ostream& out, const RewardSurface& surface);

}  // namespace etrl

#endif  // ETRL_ORACLE_HPP
