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

#ifndef ETRL_THERMAL_HPP
#define ETRL_THERMAL_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "etrl/errors.hpp"

namespace etrl {

/// First-order RC model of a single heated zone:
///   C dT/dt + K (T - T_out) = u * Q_h
struct BuildingParams {
  double heat_capacity_j_per_k = 2000.0e3;
  double conductance_w_per_k = 325.0;
  double heater_power_w = 13.0e3;

  /// C / K in seconds.
  double time_constant_s() const { return heat_capacity_j_per_k / conductance_w_per_k; }
  /// Temperature rise the heater can hold above outdoor air at steady state.
  double heater_lift_k() const { return heater_power_w / conductance_w_per_k; }
  double asymptote(double t_out, bool heater_on) const {
    return heater_on ? t_out + heater_lift_k() : t_out;
  }

  void validate() const;
};

struct ConstantWeather {
  double t_out_c = -10.0;
};

struct SinusoidWeather {
  double mean_c = -10.0;
  double amplitude_c = 5.0;
  double period_s = 86400.0;
  double phase_s = 0.0;
};

/// Piecewise-linear outdoor temperature samples, wrapped periodically past the
/// last timestamp. Period is the span from the first to the last sample.
struct TraceWeather {
  std::vector<std::pair<double, double>> samples;  // (t_s, T_out_C)
};

class WeatherModel {
 public:
  using Variant = std::variant<ConstantWeather, SinusoidWeather, TraceWeather>;

  WeatherModel() = default;
  WeatherModel(ConstantWeather w) : model_(w) {}
  WeatherModel(SinusoidWeather w);
  WeatherModel(TraceWeather w);

  /// Loads a `t_s,T_out_C` CSV trace.
  static WeatherModel from_csv(const std::filesystem::path& path);

  double at(double t_s) const;
  bool is_constant() const { return std::holds_alternative<ConstantWeather>(model_); }
  double min_c() const;
  double max_c() const;

  const Variant& variant() const { return model_; }

 private:
  Variant model_{ConstantWeather{}};
};

struct SystemState {
  double t_in_c = 15.0;
  double t_out_c = -10.0;
  bool heater_on = false;
  double t_s = 0.0;
};

/// Exact solution of the RC model over `dt_s` with outdoor temperature frozen.
double closed_form_temperature(const BuildingParams& bp, double t0_c, double t_out_c, bool heater_on,
                               double dt_s);

/// Time for the frozen-weather trajectory starting at `t0_c` to reach `threshold_c`.
/// Empty when the threshold is not strictly between the start and the asymptote.
/// A threshold equal to the start temperature is reached at dt = 0.
std::optional<double> time_to_threshold(const BuildingParams& bp, double t0_c, double t_out_c,
                                        bool heater_on, double threshold_c);

}  // namespace etrl

#endif  // ETRL_THERMAL_HPP
