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

#include "etrl/learners.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace etrl {

double ExplorationConfig::stddev(std::uint64_t k) const {
  return std0_c * std::pow(decay, static_cast<double>(k));
}

void TrainConfig::validate() const {
  for (double a : {alpha_j, alpha_v, alpha_w, alpha_theta}) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw ConfigError("learning rates must be finite and >= 0");
  }
  for (double l : {lambda_v, lambda_theta}) {
    if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("trace decay must lie in [0, 1]");
  }
  if (!(exploration.std0_c >= 0.0) || !(exploration.decay > 0.0 && exploration.decay <= 1.0)) {
    throw ConfigError("exploration std must be >= 0 and decay in (0, 1]");
  }
  if (!(sigma_min_c > 0.0 && sigma_min_c <= init_sigma_c && init_sigma_c <= sigma_max_c)) {
    throw ConfigError("policy std bounds must satisfy 0 < sigma_min <= init_sigma <= sigma_max");
  }
  if (!(duration_days > 0.0)) throw ConfigError("training duration must be positive");
  if (!(theta_min_c < theta_max_c)) throw ConfigError("divergence bounds are inverted");
}

VectorXd TrainConfig::initial_theta() const {
  VectorXd theta = VectorXd::Zero(features.dim());
  theta[0] = init_theta_on_c;
  theta[1] = init_theta_off_c;
  return theta;
}

namespace {

double draw_noise(double stddev, Rng& rng) {
  if (stddev <= 0.0) return 0.0;
  std::normal_distribution<double> dist(0.0, stddev);
  return dist(rng);
}

void check_divergence(const VectorXd& theta, const TrainConfig& cfg, std::uint64_t k, double t_s) {
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta[i]) || theta[i] < cfg.theta_min_c || theta[i] > cfg.theta_max_c) {
      std::ostringstream msg;
      msg << "policy parameter " << i << " diverged to " << theta[i] << " at update " << k
          << " (t = " << t_s << " s); allowed range [" << cfg.theta_min_c << ", "
          << cfg.theta_max_c << "]";
      throw DivergenceError(msg.str());
    }
  }
}

UpdateRecord make_record(std::uint64_t k, const Transition& tr, double raw, double delta,
                         double jbar) {
  UpdateRecord rec;
  rec.k = k;
  rec.t_s = tr.s_next.t_s;
  rec.dwell_s = tr.dwell_s;
  rec.raw_action_c = raw;
  rec.action_c = tr.a.value_c;
  rec.heater_on = tr.s.heater_on;
  rec.timeout = tr.timeout;
  rec.reward = tr.reward;
  rec.delta = delta;
  rec.jbar_per_s = jbar;
  return rec;
}

}  // namespace

TrainResult train_stochastic(const Environment& env, const TrainConfig& cfg) {
  env.validate();
  cfg.validate();
  const FeatureConfig& fc = cfg.features;
  const int dim = fc.dim();

  StochasticPolicyParams pi;
  pi.mean_weights = cfg.initial_theta();
  pi.log_std = VectorXd::Constant(cfg.per_mode_sigma ? dim : 1, std::log(cfg.init_sigma_c));
  CriticParams critic;
  critic.v = VectorXd::Zero(dim);
  critic.jbar_per_s = 0.0;

  VectorXd z_v = VectorXd::Zero(dim);
  VectorXd z_mean = VectorXd::Zero(dim);
  VectorXd z_std = VectorXd::Zero(pi.log_std.size());

  Rng rng(cfg.seed);
  Plant plant(env);
  TrainResult out;
  const double horizon = cfg.duration_s();

  for (std::uint64_t k = 0; plant.state().t_s < horizon; ++k) {
    const SystemState s = plant.state();
    const double a = stochastic_sample(pi, s, rng, fc);
    const Transition tr = plant.advance(a);
    const SystemState& s_next = tr.s_next;

    const double delta = td_error_v(tr.reward, critic.jbar_per_s, tr.dwell_s,
                                    state_value(critic, s_next, fc), state_value(critic, s, fc));
    critic.jbar_per_s = update_average_reward(critic.jbar_per_s, cfg.alpha_j, delta, tr.dwell_s);
    z_v = cfg.lambda_v * z_v + features(s, fc);
    if (!tr.timeout) {
      const StochasticScore g = stochastic_score(pi, s, a, fc);
      z_mean = cfg.lambda_theta * z_mean + g.mean;
      z_std = cfg.lambda_theta * z_std + g.log_std;
    }
    critic.v += cfg.alpha_v * delta * z_v;
    if (!tr.timeout) {
      pi.mean_weights += cfg.alpha_theta * delta * z_mean;
      pi.log_std += cfg.alpha_theta * delta * z_std;
      pi.log_std = pi.log_std.cwiseMax(std::log(cfg.sigma_min_c)).cwiseMin(std::log(cfg.sigma_max_c));
    }
    check_divergence(pi.mean_weights, cfg, k, s_next.t_s);

    out.total_reward += tr.reward;
    out.total_time_s += tr.dwell_s;
    UpdateRecord rec = make_record(k, tr, a, delta, critic.jbar_per_s);
    rec.theta = pi.mean_weights;
    rec.log_std = pi.log_std;
    rec.v = critic.v;
    out.history.push_back(std::move(rec));
    out.trace.record_transition(tr, critic.jbar_per_s * kSecondsPerHour);
  }

  out.final_params.theta = pi.mean_weights;
  out.final_params.log_std = pi.log_std;
  out.final_params.v = critic.v;
  out.final_params.w = VectorXd::Zero(dim);
  out.final_params.jbar_per_hr = critic.jbar_per_s * kSecondsPerHour;
  return out;
}

namespace {

struct DeterministicLearner {
  const TrainConfig& cfg;
  const FeatureConfig& fc;
  DeterministicPolicyParams mu;
  CriticParams critic;

  explicit DeterministicLearner(const TrainConfig& c) : cfg(c), fc(c.features) {
    mu.weights = cfg.initial_theta();
    critic.v = VectorXd::Zero(fc.dim());
    critic.w = VectorXd::Zero(fc.dim());
  }

  // One COPDAC-Q update from (s, a, r, dwell, s'); returns the TD error.
  double update(const SystemState& s, double a, double reward, double dwell,
                const SystemState& s_next, bool actor) {
    const double q_next = compatible_q(critic, mu, s_next, deterministic_action(mu, s_next, fc), fc);
    const double q_now = compatible_q(critic, mu, s, a, fc);
    const double delta = td_error_q(reward, critic.jbar_per_s, dwell, q_next, q_now);
    critic.jbar_per_s = update_average_reward(critic.jbar_per_s, cfg.alpha_j, delta, dwell);
    const VectorXd grad_mu = deterministic_gradient(mu, s, fc);
    const VectorXd grad_w = compatible_q_grad_w(critic, mu, s, a, fc);
    critic.v += cfg.alpha_v * delta * features(s, fc);
    critic.w += cfg.alpha_w * delta * grad_w;
    if (actor) {
      mu.weights += cfg.alpha_theta * grad_mu * grad_mu.dot(critic.w);
    }
    return delta;
  }

  void fill(UpdateRecord& rec) const {
    rec.theta = mu.weights;
    rec.v = critic.v;
    rec.w = critic.w;
  }

  SavedParams saved() const {
    SavedParams p;
    p.theta = mu.weights;
    p.v = critic.v;
    p.w = critic.w;
    p.jbar_per_hr = critic.jbar_per_s * kSecondsPerHour;
    return p;
  }
};

}  // namespace

TrainResult train_deterministic(const Environment& env, const TrainConfig& cfg) {
  env.validate();
  cfg.validate();
  DeterministicLearner learner(cfg);
  Rng rng(cfg.seed);
  Plant plant(env);
  TrainResult out;
  const double horizon = cfg.duration_s();

  for (std::uint64_t k = 0; plant.state().t_s < horizon; ++k) {
    const SystemState s = plant.state();
    const double a = deterministic_action(learner.mu, s, cfg.features) +
                     draw_noise(cfg.exploration.stddev(k), rng);
    const Transition tr = plant.advance(a);
    const double delta = learner.update(s, a, tr.reward, tr.dwell_s, tr.s_next, !tr.timeout);
    check_divergence(learner.mu.weights, cfg, k, tr.s_next.t_s);

    out.total_reward += tr.reward;
    out.total_time_s += tr.dwell_s;
    UpdateRecord rec = make_record(k, tr, a, delta, learner.critic.jbar_per_s);
    learner.fill(rec);
    out.history.push_back(std::move(rec));
    out.trace.record_transition(tr, learner.critic.jbar_per_s * kSecondsPerHour);
  }
  out.final_params = learner.saved();
  return out;
}

namespace {

// Holds the heater status for `duration_s` without switching.
Transition hold(const Environment& env, const SystemState& s, double duration_s) {
  SimOptions opts = env.sim;
  opts.max_dwell_s = duration_s;
  opts.min_dwell_s = std::min(opts.min_dwell_s, duration_s);
  opts.control_tick_s = 0.0;
  // A threshold beyond the asymptote is never reached.
  const double unreachable = s.heater_on ? 1e9 : -1e9;
  return step_to_event(env.building, env.weather, s, {unreachable, pending_switch(s.heater_on)},
                       env.rewards, opts);
}

}  // namespace

TrainResult train_fixed_interval(const Environment& env, const TrainConfig& cfg,
                                 std::span<const double> ticks, FixedIntervalMode mode) {
  env.validate();
  cfg.validate();
  for (double t : ticks) {
    if (!(t > 0.0)) throw ConfigError("tick lengths must be positive");
  }
  const FeatureConfig& fc = cfg.features;
  DeterministicLearner learner(cfg);
  Rng rng(cfg.seed);
  SystemState state = env.initial;
  TrainResult out;

  for (std::uint64_t k = 0; k < ticks.size(); ++k) {
    const double tick = ticks[k];
    const SystemState s = state;
    const double a = deterministic_action(learner.mu, s, fc) + draw_noise(cfg.exploration.stddev(k), rng);

    Transition tick_tr;
    tick_tr.s = s;
    tick_tr.reward = 0.0;
    bool switched = false;

    if (mode == FixedIntervalMode::FixedControl) {
      const double threshold = std::clamp(a, env.clamp.band_lo_c, env.clamp.band_hi_c);
      tick_tr.a = {threshold, pending_switch(s.heater_on)};
      SystemState cur = s;
      if (s.heater_on ? s.t_in_c >= threshold : s.t_in_c <= threshold) {
        cur.heater_on = !cur.heater_on;
        tick_tr.reward += env.rewards.switch_penalty;
        switched = true;
      }
      const Transition seg = hold(env, cur, tick);
      tick_tr.reward += seg.reward;
      state = seg.s_next;
    } else {
      tick_tr.a = clamp_action(a, s, env.clamp);
      SimOptions opts = env.sim;
      opts.control_tick_s = 0.0;
      SystemState cur = s;
      ThresholdAction threshold = tick_tr.a;
      double remaining = tick;
      while (remaining > 0.0) {
        opts.max_dwell_s = remaining;
        opts.min_dwell_s = std::min(env.sim.min_dwell_s, remaining);
        const Transition seg =
            step_to_event(env.building, env.weather, cur, threshold, env.rewards, opts);
        tick_tr.reward += seg.reward;
        remaining -= seg.dwell_s;
        cur = seg.s_next;
        if (!seg.timeout) {
          switched = true;
          threshold = clamp_action(deterministic_action(learner.mu, cur, fc), cur, env.clamp);
        }
      }
      state = cur;
    }
    // Tick boundaries are accumulated from the tick lengths rather than the
    // per-segment dwells so the clock does not drift.
    state.t_s = s.t_s + tick;
    state.t_out_c = env.weather.at(state.t_s);
    tick_tr.dwell_s = tick;
    tick_tr.s_next = state;
    tick_tr.timeout = !switched;

    const double delta = learner.update(s, a, tick_tr.reward, tick, state, true);
    check_divergence(learner.mu.weights, cfg, k, state.t_s);

    out.total_reward += tick_tr.reward;
    out.total_time_s += tick;
    UpdateRecord rec = make_record(k, tick_tr, a, delta, learner.critic.jbar_per_s);
    learner.fill(rec);
    out.history.push_back(std::move(rec));
    out.trace.record_transition(tick_tr, learner.critic.jbar_per_s * kSecondsPerHour);
  }
  out.final_params = learner.saved();
  return out;
}

TrainResult train_fixed_interval(const Environment& env, const TrainConfig& cfg, double tick_s,
                                 FixedIntervalMode mode) {
  if (!(tick_s > 0.0)) throw ConfigError("tick length must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(cfg.duration_s() / tick_s));
  const std::vector<double> ticks(n, tick_s);
  return train_fixed_interval(env, cfg, ticks, mode);
}

void write_training_log(std::ostream& out, const std::vector<UpdateRecord>& history) {
  out << kTrainingLogHeader << '\n';
  for (const auto& r : history) {
    out << r.k << ',' << format_double(r.t_s) << ',' << format_double(r.dwell_s) << ','
        << format_double(r.action_c) << ',' << format_double(r.reward) << ','
        << format_double(r.delta) << ',' << format_double(r.jbar_per_s * kSecondsPerHour) << ','
        << format_double(r.theta[0]) << ',' << format_double(r.theta[1]) << ',';
    if (r.log_std.size() > 0) out << format_double(r.log_std[0]);
    out << '\n';
  }
}

double jbar_trace_std(const std::vector<UpdateRecord>& history, double t_from_s, double t_to_s,
                      double sample_dt_s) {
  if (history.empty() || !(sample_dt_s > 0.0) || !(t_to_s > t_from_s)) return 0.0;
  std::vector<double> samples;
  std::size_t idx = 0;
  double current = 0.0;
  for (double t = t_from_s; t <= t_to_s; t += sample_dt_s) {
    while (idx < history.size() && history[idx].t_s <= t) {
      current = history[idx].jbar_per_s * kSecondsPerHour;
      ++idx;
    }
    samples.push_back(current);
  }
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(samples.size()));
}

}  // namespace etrl
