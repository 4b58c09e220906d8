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

#include "etrl/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace etrl {

void BuildingParams::validate() const {
  if (!(heat_capacity_j_per_k > 0.0) || !(conductance_w_per_k > 0.0) || !(heater_power_w > 0.0)) {
    throw InputError("building parameters must be strictly positive");
  }
  if (!std::isfinite(heat_capacity_j_per_k) || !std::isfinite(conductance_w_per_k) ||
      !std::isfinite(heater_power_w)) {
    throw InputError("building parameters must be finite");
  }
}

WeatherModel::WeatherModel(SinusoidWeather w) : model_(w) {
  if (!(w.period_s > 0.0)) throw InputError("sinusoid weather period must be positive");
  if (!std::isfinite(w.mean_c) || !std::isfinite(w.amplitude_c) || !std::isfinite(w.phase_s)) {
    throw InputError("sinusoid weather parameters must be finite");
  }
}

WeatherModel::WeatherModel(TraceWeather w) {
  if (w.samples.empty()) throw InputError("weather trace is empty");
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    const auto& [t, temp] = w.samples[i];
    if (!std::isfinite(t) || !std::isfinite(temp)) {
      throw InputError("weather trace contains a non-finite value at row " + std::to_string(i + 1));
    }
    if (i > 0 && !(t > w.samples[i - 1].first)) {
      throw InputError("weather trace timestamps must be strictly increasing (row " +
                       std::to_string(i + 1) + ")");
    }
  }
  model_ = std::move(w);
}

WeatherModel WeatherModel::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open weather trace " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InputError("weather trace " + path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "t_s,T_out_C") {
    throw InputError("weather trace " + path.string() + ": expected header 't_s,T_out_C'");
  }
  TraceWeather trace;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected two columns");
    }
    try {
      std::size_t used = 0;
      const std::string a = line.substr(0, comma);
      const std::string b = line.substr(comma + 1);
      const double t = std::stod(a, &used);
      if (used != a.size()) throw std::invalid_argument(a);
      const double temp = std::stod(b, &used);
      if (used != b.size()) throw std::invalid_argument(b);
      trace.samples.emplace_back(t, temp);
    } catch (const std::logic_error&) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    }
  }
  try {
    return WeatherModel(std::move(trace));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

double WeatherModel::at(double t_s) const {
  return std::visit(
      [t_s](const auto& w) -> double {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, ConstantWeather>) {
          return w.t_out_c;
        } else if constexpr (std::is_same_v<W, SinusoidWeather>) {
          return w.mean_c +
                 w.amplitude_c * std::sin(2.0 * std::numbers::pi * (t_s + w.phase_s) / w.period_s);
        } else {
          const auto& s = w.samples;
          if (s.size() == 1) return s.front().second;
          const double t0 = s.front().first;
          const double span = s.back().first - t0;
          double t = std::fmod(t_s - t0, span);
          if (t < 0.0) t += span;
          t += t0;
          auto hi = std::upper_bound(s.begin(), s.end(), t,
                                     [](double v, const auto& p) { return v < p.first; });
          if (hi == s.end()) return s.back().second;
          if (hi == s.begin()) return s.front().second;
          auto lo = std::prev(hi);
          const double f = (t - lo->first) / (hi->first - lo->first);
          return lo->second + f * (hi->second - lo->second);
        }
      },
      model_);
}

double WeatherModel::min_c() const {
  return std::visit(
      [](const auto& w) -> double {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, ConstantWeather>) {
          return w.t_out_c;
        } else if constexpr (std::is_same_v<W, SinusoidWeather>) {
          return w.mean_c - std::abs(w.amplitude_c);
        } else {
          return std::min_element(w.samples.begin(), w.samples.end(),
                                  [](const auto& a, const auto& b) { return a.second < b.second; })
              ->second;
        }
      },
      model_);
}

double WeatherModel::max_c() const {
  return std::visit(
      [](const auto& w) -> double {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, ConstantWeather>) {
          return w.t_out_c;
        } else if constexpr (std::is_same_v<W, SinusoidWeather>) {
          return w.mean_c + std::abs(w.amplitude_c);
        } else {
          return std::max_element(w.samples.begin(), w.samples.end(),
                                  [](const auto& a, const auto& b) { return a.second < b.second; })
              ->second;
        }
      },
      model_);
}

double closed_form_temperature(const BuildingParams& bp, double t0_c, double t_out_c, bool heater_on,
                               double dt_s) {
  const double t_inf = bp.asymptote(t_out_c, heater_on);
  return t_inf + (t0_c - t_inf) * std::exp(-dt_s / bp.time_constant_s());
}

std::optional<double> time_to_threshold(const BuildingParams& bp, double t0_c, double t_out_c,
                                        bool heater_on, double threshold_c) {
  const double t_inf = bp.asymptote(t_out_c, heater_on);
  if (threshold_c == t0_c) return 0.0;
  // Threshold must lie in the open interval between start and asymptote.
  const double lo = std::min(t0_c, t_inf);
  const double hi = std::max(t0_c, t_inf);
  if (!(threshold_c > lo && threshold_c < hi)) return std::nullopt;
  return bp.time_constant_s() * std::log((t_inf - t0_c) / (t_inf - threshold_c));
}

}  // namespace etrl
