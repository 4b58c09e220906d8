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

#ifndef ETRL_CONFIG_HPP
#define ETRL_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "etrl/learners.hpp"
#include "etrl/oracle.hpp"

namespace etrl {

enum class WeatherKind { Constant, Sinusoid, Trace };

/// Experiment configuration, held in file units (kJ/K, kW, unit/hr, hours)
/// so that parse -> write -> parse is exact. Accessors convert to the SI
/// structures used by the simulator and learners.
struct RunConfig {
  // [building]
  double heat_capacity_kj_per_k = 2000.0;
  double conductance_w_per_k = 325.0;
  double heater_power_kw = 13.0;

  // [weather]
  WeatherKind weather_kind = WeatherKind::Constant;
  double t_out_c = -10.0;
  double mean_c = -10.0;
  double amplitude_c = 5.0;
  double period_h = 24.0;
  double phase_h = 0.0;
  std::string trace_file;  // relative paths resolve against base_dir

  // [rewards]
  double switch_penalty = -0.8;
  double energy_per_hr = -1.2;
  double comfort_per_hr = -1.2;
  double desired_temperature_c = 15.0;

  // [sim]
  double step_s = 10.0;
  double event_tol_s = 0.1;
  double event_temp_tol_c = 1e-3;
  double max_dwell_h = 24.0;
  double min_dwell_s = 1.0;
  bool force_numeric = false;
  double initial_t_in_c = 15.0;
  double band_margin_c = 2.0;
  double gap_c = 0.1;

  // [train]
  TrainConfig train;
  double tick_s = 300.0;

  // [grid]
  GridSpec grid;
  double grid_eval_days = 10.0;

  // [run]
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double eval_days = 10.0;
  double jbar_window_days = 5.0;
  std::vector<double> td_sweep_c{14.0, 15.0, 16.0};

  // Directory used to resolve trace_file; not serialized.
  std::filesystem::path base_dir;

  BuildingParams building() const;
  RewardWeights rewards() const;
  SimOptions sim() const;
  WeatherModel weather() const;
  Environment environment() const;

  /// Checks every section's invariants and that referenced files exist.
  /// Throws ConfigError.
  void validate() const;

  bool operator==(const RunConfig& o) const;
};

/// Parses the sectioned `key = value` format. `#` and `;` start comments.
/// Unknown sections or keys, duplicates and malformed values raise
/// ConfigError naming `source` and the line number. The result is validated.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>",
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Writes every key with shortest round-trip numbers.
void write_config(std::ostream& out, const RunConfig& cfg);
std::string config_to_string(const RunConfig& cfg);

}  // namespace etrl

#endif  // ETRL_CONFIG_HPP
