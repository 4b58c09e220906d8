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

#include "etrl/simulator.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace etrl {

void SimOptions::validate() const {
  if (!(step_s > 0.0)) throw InputError("sim step must be positive");
  if (!(event_tol_s > 0.0) || !(event_temp_tol_c > 0.0)) {
    throw InputError("event tolerances must be positive");
  }
  if (!(max_dwell_s > 0.0)) throw InputError("max dwell must be positive");
  if (!(min_dwell_s > 0.0) || min_dwell_s > max_dwell_s) {
    throw InputError("min dwell must be positive and not exceed max dwell");
  }
  if (control_tick_s < 0.0) throw InputError("control tick must be non-negative");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool reached(bool heater_on, double t_in, double threshold) {
  return heater_on ? t_in >= threshold : t_in <= threshold;
}

// Offset from `t0` to the first absolute tick strictly after it.
double first_tick_offset(double t0, double tick) {
  const double n = std::floor(t0 / tick + 1e-9) + 1.0;
  return n * tick - t0;
}

double outdoor_at(const WeatherModel& weather, double t) {
  const double v = weather.at(t);
  if (!std::isfinite(v)) throw InputError("weather model produced a non-finite temperature");
  return v;
}

struct Dwell {
  std::vector<TrajectorySample> samples;  // times relative to dwell start
  bool switched = false;
};

// Constant weather: exact crossing time, samples taken from the closed form.
Dwell analytic_dwell(const BuildingParams& bp, double t_out, const SystemState& s, double threshold,
                     const SimOptions& opts) {
  double cross = 0.0;
  if (!reached(s.heater_on, s.t_in_c, threshold)) {
    cross = time_to_threshold(bp, s.t_in_c, t_out, s.heater_on, threshold).value_or(kInf);
  }
  double event = cross;
  if (opts.control_tick_s > 0.0 && std::isfinite(cross)) {
    const double first = first_tick_offset(s.t_s, opts.control_tick_s);
    const double m = std::max(0.0, std::ceil((cross - first) / opts.control_tick_s));
    event = first + m * opts.control_tick_s;
  }

  Dwell d;
  double end = 0.0;
  if (event > opts.max_dwell_s) {
    end = opts.max_dwell_s;
  } else {
    end = std::max(event, opts.min_dwell_s);
    d.switched = true;
  }

  const auto n_steps = static_cast<std::size_t>(std::ceil(end / opts.step_s));
  d.samples.reserve(n_steps + 2);
  d.samples.push_back({0.0, s.t_in_c});
  for (std::size_t k = 1; static_cast<double>(k) * opts.step_s < end; ++k) {
    const double dt = static_cast<double>(k) * opts.step_s;
    d.samples.push_back({dt, closed_form_temperature(bp, s.t_in_c, t_out, s.heater_on, dt)});
  }
  const double t_end = (d.switched && end == cross && opts.control_tick_s == 0.0)
                           ? threshold
                           : closed_form_temperature(bp, s.t_in_c, t_out, s.heater_on, end);
  d.samples.push_back({end, t_end});
  return d;
}

// Time-varying weather: piecewise-exponential stepping with the step-start
// outdoor temperature, bisection on the step that brackets the crossing.
Dwell numeric_dwell(const BuildingParams& bp, const WeatherModel& weather, const SystemState& s,
                    double threshold, const SimOptions& opts) {
  const bool ticked = opts.control_tick_s > 0.0;
  double next_tick = ticked ? first_tick_offset(s.t_s, opts.control_tick_s) : kInf;

  Dwell d;
  d.samples.push_back({0.0, s.t_in_c});
  double t = 0.0;
  double temp = s.t_in_c;

  if (!ticked && reached(s.heater_on, temp, threshold)) {
    d.switched = true;
  }
  while (!d.switched && t < opts.max_dwell_s) {
    const double next = std::min({t + opts.step_s, opts.max_dwell_s, next_tick});
    const double t_out = outdoor_at(weather, s.t_s + t);
    const double temp_next = closed_form_temperature(bp, temp, t_out, s.heater_on, next - t);

    if (!ticked && reached(s.heater_on, temp_next, threshold)) {
      double lo = 0.0;
      double hi = next - t;
      double temp_hi = temp_next;
      for (int it = 0; it < 200; ++it) {
        if (hi - lo <= opts.event_tol_s && std::abs(temp_hi - threshold) <= opts.event_temp_tol_c) {
          break;
        }
        const double mid = 0.5 * (lo + hi);
        const double temp_mid = closed_form_temperature(bp, temp, t_out, s.heater_on, mid);
        if (reached(s.heater_on, temp_mid, threshold)) {
          hi = mid;
          temp_hi = temp_mid;
        } else {
          lo = mid;
        }
      }
      t += hi;
      temp = temp_hi;
      d.samples.push_back({t, temp});
      d.switched = true;
      break;
    }

    t = next;
    temp = temp_next;
    d.samples.push_back({t, temp});
    if (ticked && t == next_tick) {
      if (reached(s.heater_on, temp, threshold)) {
        d.switched = true;
        break;
      }
      next_tick += opts.control_tick_s;
    }
  }

  // Immediate or near-immediate crossings still occupy the minimum dwell.
  while (d.switched && t < opts.min_dwell_s) {
    const double next = std::min(t + opts.step_s, opts.min_dwell_s);
    temp = closed_form_temperature(bp, temp, outdoor_at(weather, s.t_s + t), s.heater_on, next - t);
    t = next;
    d.samples.push_back({t, temp});
  }
  return d;
}

}  // namespace

Transition step_to_event(const BuildingParams& bp, const WeatherModel& weather, const SystemState& s,
                         const ThresholdAction& a, const RewardWeights& rw, const SimOptions& opts,
                         const SampleSink& sink) {
  if (!std::isfinite(s.t_in_c) || !std::isfinite(a.value_c)) {
    throw InputError("non-finite temperature or threshold");
  }
  Dwell d = (weather.is_constant() && !opts.force_numeric)
                ? analytic_dwell(bp, weather.at(s.t_s), s, a.value_c, opts)
                : numeric_dwell(bp, weather, s, a.value_c, opts);

  Transition tr;
  tr.s = s;
  tr.a = a;
  tr.timeout = !d.switched;
  tr.reward = accumulate_reward(d.samples, s.heater_on, rw, d.switched);
  const auto& last = d.samples.back();
  tr.dwell_s = last.t_s;
  tr.s_next.t_s = s.t_s + last.t_s;
  tr.s_next.t_in_c = last.t_in_c;
  tr.s_next.t_out_c = weather.at(tr.s_next.t_s);
  tr.s_next.heater_on = d.switched ? !s.heater_on : s.heater_on;

  if (sink) {
    for (const auto& p : d.samples) {
      sink(SystemState{p.t_in_c, weather.at(s.t_s + p.t_s), s.heater_on, s.t_s + p.t_s});
    }
  }
  return tr;
}

}  // namespace etrl
