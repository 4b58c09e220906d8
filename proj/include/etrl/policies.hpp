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

#ifndef ETRL_POLICIES_HPP
#define ETRL_POLICIES_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>

#include <Eigen/Core>

#include "etrl/smdp.hpp"

namespace etrl {

using Eigen::VectorXd;

enum class FeatureMap {
  OneHot,         // [1 - h, h]
  OneHotOutdoor,  // [1 - h, h, (1 - h) x, h x], x = (T_out - ref) / scale
};

struct FeatureConfig {
  FeatureMap map = FeatureMap::OneHot;
  double outdoor_ref_c = -10.0;
  double outdoor_scale_c = 10.0;

  int dim() const { return map == FeatureMap::OneHot ? 2 : 4; }
  bool operator==(const FeatureConfig&) const = default;
};

/// State features. With the default map exactly one entry is 1, selecting the
/// ON-threshold component while the heater is off and the OFF-threshold
/// component while it is on.
VectorXd features(const SystemState& s, const FeatureConfig& fc = {});

/// Gaussian threshold policy: mean = theta_m . phi, std = exp(log_std . phi)
/// for per-mode deviations, or exp(log_std[0]) when a single deviation is
/// shared across modes.
struct StochasticPolicyParams {
  VectorXd mean_weights;
  VectorXd log_std;

  bool shared_std() const { return log_std.size() == 1; }
  double mean(const VectorXd& phi) const { return mean_weights.dot(phi); }
  double stddev(const VectorXd& phi) const;
};

struct StochasticScore {
  VectorXd mean;     // d log pi / d theta_m
  VectorXd log_std;  // d log pi / d theta_sigma
};

double stochastic_sample(const StochasticPolicyParams& p, const SystemState& s, Rng& rng,
                         const FeatureConfig& fc = {});
double stochastic_log_density(const StochasticPolicyParams& p, const SystemState& s, double a,
                              const FeatureConfig& fc = {});
StochasticScore stochastic_score(const StochasticPolicyParams& p, const SystemState& s, double a,
                                 const FeatureConfig& fc = {});

/// Linear deterministic threshold policy mu(s) = theta . phi(s).
struct DeterministicPolicyParams {
  VectorXd weights;
};

double deterministic_action(const DeterministicPolicyParams& p, const SystemState& s,
                            const FeatureConfig& fc = {});
/// Jacobian of mu with respect to theta; for the linear family this is phi(s).
VectorXd deterministic_gradient(const DeterministicPolicyParams& p, const SystemState& s,
                                const FeatureConfig& fc = {});

struct CriticParams {
  VectorXd v;               // state-value weights
  VectorXd w;               // compatible advantage weights
  double jbar_per_s = 0.0;  // average-reward estimate
};

double state_value(const CriticParams& c, const SystemState& s, const FeatureConfig& fc = {});

/// Q^w(s, a) = (a - mu(s)) grad_theta mu(s)^T w + v . phi(s).
double compatible_q(const CriticParams& c, const DeterministicPolicyParams& p, const SystemState& s,
                    double a, const FeatureConfig& fc = {});
/// Gradient of compatible_q with respect to w: (a - mu(s)) grad_theta mu(s).
VectorXd compatible_q_grad_w(const CriticParams& c, const DeterministicPolicyParams& p,
                             const SystemState& s, double a, const FeatureConfig& fc = {});

Policy make_stochastic_policy(StochasticPolicyParams p, FeatureConfig fc = {});
Policy make_deterministic_policy(DeterministicPolicyParams p, FeatureConfig fc = {});
/// Constant (T_ON, T_OFF) hysteresis controller.
Policy make_threshold_policy(double t_on_c, double t_off_c);

/// Persisted learner output. `log_std` is empty for deterministic policies.
struct SavedParams {
  VectorXd theta;
  std::optional<VectorXd> log_std;
  VectorXd v;
  VectorXd w;
  double jbar_per_hr = 0.0;
};

/// Flat `key=value` lines: theta_on, theta_off (theta_<i> beyond two),
/// theta_sigma (theta_sigma_<i> beyond one), v<i>, w<i>, jbar_per_hr.
void write_params(std::ostream& out, const SavedParams& p);
SavedParams read_params(std::istream& in);
SavedParams read_params_file(const std::filesystem::path& path);

}  // namespace etrl

#endif  // ETRL_POLICIES_HPP
