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

#include "etrl/smdp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace etrl {

ClampConfig ClampConfig::from_model(const BuildingParams& bp, const WeatherModel& weather,
                                    double margin_c, double gap_c) {
  ClampConfig c;
  c.band_lo_c = weather.min_c() + margin_c;
  c.band_hi_c = weather.max_c() + bp.heater_lift_k() - margin_c;
  c.gap_c = gap_c;
  if (!(c.band_lo_c < c.band_hi_c)) throw InputError("threshold band is empty");
  return c;
}

ThresholdAction clamp_action(double raw_c, const SystemState& s, const ClampConfig& cfg) {
  double v = raw_c;
  if (s.heater_on) {
    v = std::max(v, s.t_in_c + cfg.gap_c);
  } else {
    v = std::min(v, s.t_in_c - cfg.gap_c);
  }
  v = std::clamp(v, cfg.band_lo_c, cfg.band_hi_c);
  return {v, pending_switch(s.heater_on)};
}

Environment Environment::make(const BuildingParams& bp, WeatherModel weather,
                              const RewardWeights& rw, const SimOptions& sim, double t_in0_c,
                              double margin_c, double gap_c) {
  Environment env;
  env.building = bp;
  env.clamp = ClampConfig::from_model(bp, weather, margin_c, gap_c);
  env.weather = std::move(weather);
  env.rewards = rw;
  env.sim = sim;
  env.initial = SystemState{t_in0_c, env.weather.at(0.0), false, 0.0};
  return env;
}

void Environment::validate() const {
  building.validate();
  rewards.validate();
  sim.validate();
  if (!(clamp.gap_c >= 0.0)) throw InputError("hysteresis gap must be non-negative");
  if (!std::isfinite(initial.t_in_c)) throw InputError("initial temperature must be finite");
}

Transition Plant::advance(double raw_threshold_c, const SampleSink& sink) {
  const ThresholdAction a = clamp_action(raw_threshold_c, state_, env_->clamp);
  Transition tr = step_to_event(env_->building, env_->weather, state_, a, env_->rewards, env_->sim, sink);
  state_ = tr.s_next;
  return tr;
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void EventTrace::record_transition(const Transition& tr, double avg_reward_per_hr) {
  cum_ += tr.reward;
  records_.push_back(TraceRecord{tr.s_next.t_s, tr.s_next.t_in_c, tr.s_next.t_out_c,
                                 tr.s_next.heater_on,
                                 tr.timeout ? TraceFlag::Timeout : TraceFlag::Switch, tr.a.value_c,
                                 tr.reward, cum_, avg_reward_per_hr});
}

void EventTrace::record_sample(const SystemState& s) {
  TraceRecord r;
  r.t_s = s.t_s;
  r.t_in_c = s.t_in_c;
  r.t_out_c = s.t_out_c;
  r.heater_on = s.heater_on;
  r.flag = TraceFlag::Sample;
  r.cum_reward = cum_;
  r.avg_reward_per_hr = records_.empty() ? 0.0 : records_.back().avg_reward_per_hr;
  records_.push_back(r);
}

void EventTrace::write_csv(std::ostream& out) const {
  out << kEventTraceHeader << '\n';
  for (const auto& r : records_) {
    const bool sample = r.flag == TraceFlag::Sample;
    out << format_double(r.t_s) << ',' << format_double(r.t_in_c) << ','
        << format_double(r.t_out_c) << ',' << (r.heater_on ? 1 : 0) << ','
        << static_cast<int>(r.flag) << ',' << (sample ? "" : format_double(r.action_c)) << ','
        << (sample ? "" : format_double(r.step_reward)) << ',' << format_double(r.cum_reward)
        << ',' << format_double(r.avg_reward_per_hr) << '\n';
  }
}

RolloutResult run_policy(const Environment& env, const Policy& policy, double duration_s,
                         std::uint64_t seed, const RolloutOptions& opts) {
  if (!(duration_s > 0.0)) throw InputError("rollout duration must be positive");
  env.validate();

  Rng rng(seed);
  Plant plant(env);
  RolloutResult out;
  SampleSink sink;
  if (opts.dense) {
    sink = [&out](const SystemState& s) { out.trace.record_sample(s); };
  }
  while (plant.state().t_s < duration_s) {
    const double raw = policy(plant.state(), rng);
    const Transition tr = plant.advance(raw, sink);
    out.total_reward += tr.reward;
    out.total_time_s += tr.dwell_s;
    out.trace.record_transition(tr, out.total_reward / out.total_time_s * kSecondsPerHour);
    out.transitions.push_back(tr);
  }
  out.avg_reward_per_hr = out.total_reward / out.total_time_s * kSecondsPerHour;
  return out;
}

}  // namespace etrl
