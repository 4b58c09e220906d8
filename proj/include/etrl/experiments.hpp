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

#ifndef ETRL_EXPERIMENTS_HPP
#define ETRL_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "etrl/config.hpp"

namespace etrl {

// Experiment orchestration behind the command-line tool. The compute
// functions do no I/O; the run_* commands write artifacts and a manifest
// into an output directory and return the manifest text.

enum class Algo { Stochastic, Deterministic, FixedInterval };
enum class Control { Event, Fixed };

Algo parse_algo(const std::string& name);
std::string algo_name(Algo a);
Control parse_control(const std::string& name);
std::string control_name(Control c);

/// Reference J quoted for the linear setup's optimum; a soft target only.
inline constexpr double kReferenceOptimumJ = -3.70;

struct DesiredTempPoint {
  double desired_temperature_c = 0.0;
  double argmax_on_c = 0.0;
  double argmax_off_c = 0.0;
  double j_max_per_hr = 0.0;
};

struct GridSearchReport {
  RewardSurface surface;
  bool analytic = false;
  std::vector<DesiredTempPoint> td_sweep;
  double wall_clock_s = 0.0;
};

/// Oracle surface for `cfg` (analytic under constant weather), plus the argmax
/// for each desired temperature in the sweep.
GridSearchReport grid_search_experiment(const RunConfig& cfg);

/// Surface only, without the sweep.
RewardSurface oracle_surface(const RunConfig& cfg);

/// Trains one seed for `days` (overriding the config). The fixed-interval
/// learner uses the config tick with control executed at ticks.
TrainResult train_experiment(const RunConfig& cfg, Algo algo, std::uint64_t seed, double days);

/// The environment with control executed at events or at fixed ticks.
Environment control_environment(const RunConfig& cfg, Control control);

/// Stochastic parameters are evaluated by sampling the Gaussian policy;
/// deterministic ones by the mean policy.
Policy policy_from_params(const SavedParams& p, const FeatureConfig& fc);

RolloutResult evaluate_experiment(const RunConfig& cfg, const SavedParams& params, Control control,
                                  double days, std::uint64_t seed, bool dense = false);

/// Per-seed comparison of event-triggered and fixed-interval learning.
struct CompareRow {
  std::uint64_t seed = 0;
  SavedParams event_params;
  SavedParams fixed_params;
  double j_event = 0.0;        // event-learned, event control
  double j_fixed_fixed = 0.0;  // fixed-learned, fixed control
  double j_fixed_event = 0.0;  // fixed-learned, event control
  double err_event_c = 0.0;    // max threshold distance to the oracle argmax
  double err_fixed_c = 0.0;
  double jbar_std_event = 0.0;  // over the final window of training
  double jbar_std_fixed = 0.0;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  RewardSurface oracle;
  double median_j_event = 0.0;
  double median_j_fixed_fixed = 0.0;
  double median_j_fixed_event = 0.0;
  double median_err_event_c = 0.0;
  double median_err_fixed_c = 0.0;
  double median_jbar_std_event = 0.0;
  double median_jbar_std_fixed = 0.0;
};

/// Runs both learners for each seed concurrently. Requires at least 3 seeds.
CompareReport compare_experiment(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds,
                                 double days);

double median(std::vector<double> xs);
/// Largest absolute deviation of (on, off) from the surface argmax.
double threshold_error(const VectorXd& theta, const RewardSurface& oracle);

// Commands. Each creates `out_dir`, writes its artifacts and manifest.json,
// and returns the manifest text.
std::string run_grid_search(const RunConfig& cfg, const std::filesystem::path& out_dir);
std::string run_train(const RunConfig& cfg, Algo algo, std::uint64_t seed, double days,
                      const std::filesystem::path& out_dir);
std::string run_evaluate(const RunConfig& cfg, const std::filesystem::path& params_file,
                         Control control, double days, std::uint64_t seed,
                         const std::filesystem::path& out_dir);
std::string run_compare(const RunConfig& cfg, const std::vector<std::uint64_t>& seeds, double days,
                        const std::filesystem::path& out_dir);
/// Rolls out constant thresholds, or a params file when given, with dense
/// trajectory samples.
std::string run_simulate(const RunConfig& cfg, std::optional<std::filesystem::path> params_file,
                         double t_on_c, double t_off_c, Control control, double days,
                         std::uint64_t seed, const std::filesystem::path& out_dir);

}  // namespace etrl

#endif  // ETRL_EXPERIMENTS_HPP
