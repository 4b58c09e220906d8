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

#include "etrl/oracle.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "etrl/parallel.hpp"
#include "etrl/policies.hpp"

namespace etrl {

namespace {

// Integral of (T(t) - T_d)^2 over [0, d] for T(t) = T_inf + (T0 - T_inf) e^{-t/tau}.
double comfort_integral(double t0, double t_inf, double t_d, double tau, double d) {
  const double a = t_inf - t_d;
  const double b = t0 - t_inf;
  const double e1 = -std::expm1(-d / tau);
  const double e2 = -std::expm1(-2.0 * d / tau);
  return a * a * d + 2.0 * a * b * tau * e1 + b * b * 0.5 * tau * e2;
}

}  // namespace

LimitCycle limit_cycle(const BuildingParams& bp, const RewardWeights& rw, double t_out_c,
                       double t_on_c, double t_off_c, double gap_c) {
  const double hot = t_out_c + bp.heater_lift_k();
  if (!(t_out_c < t_on_c && t_on_c + gap_c <= t_off_c && t_off_c < hot)) {
    std::ostringstream msg;
    msg << "infeasible limit cycle (T_ON=" << t_on_c << ", T_OFF=" << t_off_c
        << ") for T_out=" << t_out_c << " and heating asymptote " << hot;
    throw DomainError(msg.str());
  }
  const double tau = bp.time_constant_s();
  LimitCycle c;
  c.t_on_s = tau * std::log((hot - t_on_c) / (hot - t_off_c));
  c.t_off_s = tau * std::log((t_off_c - t_out_c) / (t_on_c - t_out_c));
  const double comfort =
      comfort_integral(t_on_c, hot, rw.desired_temperature_c, tau, c.t_on_s) +
      comfort_integral(t_off_c, t_out_c, rw.desired_temperature_c, tau, c.t_off_s);
  c.cycle_reward = 2.0 * rw.switch_penalty + rw.energy_rate * c.t_on_s + rw.comfort_rate * comfort;
  c.j_per_hr = c.cycle_reward / c.period_s() * kSecondsPerHour;
  return c;
}

void GridSpec::validate() const {
  if (!(on_lo_c < on_hi_c) || !(off_lo_c < off_hi_c)) throw ConfigError("grid ranges need lo < hi");
  if (!(step_c > 0.0)) throw ConfigError("grid step must be positive");
  if (!(gap_c >= 0.0)) throw ConfigError("grid gap must be non-negative");
}

namespace {

std::vector<double> axis(double lo, double hi, double step) {
  std::vector<double> v;
  for (int i = 0;; ++i) {
    const double x = lo + i * step;
    if (x > hi + 1e-9 * step) break;
    v.push_back(x);
  }
  return v;
}

std::vector<SurfaceCell> enumerate(const GridSpec& spec) {
  std::vector<SurfaceCell> cells;
  for (double on : spec.on_values()) {
    for (double off : spec.off_values()) {
      if (on + spec.gap_c <= off + 1e-12) cells.push_back({on, off, std::nullopt});
    }
  }
  return cells;
}

void pick_argmax(RewardSurface& s) {
  bool found = false;
  for (const auto& c : s.cells) {
    // Lexicographic order plus strict comparison keeps the smallest pair on ties.
    if (c.j_per_hr && (!found || *c.j_per_hr > s.j_max_per_hr)) {
      s.j_max_per_hr = *c.j_per_hr;
      s.argmax_on_c = c.t_on_c;
      s.argmax_off_c = c.t_off_c;
      found = true;
    }
  }
  if (!found) throw DomainError("grid contains no feasible threshold pair");
}

}  // namespace

std::vector<double> GridSpec::on_values() const { return axis(on_lo_c, on_hi_c, step_c); }
std::vector<double> GridSpec::off_values() const { return axis(off_lo_c, off_hi_c, step_c); }

std::optional<double> RewardSurface::at(double t_on_c, double t_off_c) const {
  for (const auto& c : cells) {
    if (std::abs(c.t_on_c - t_on_c) < 1e-9 && std::abs(c.t_off_c - t_off_c) < 1e-9) return c.j_per_hr;
  }
  return std::nullopt;
}

RewardSurface grid_search_analytic(const BuildingParams& bp, const RewardWeights& rw,
                                   double t_out_c, const GridSpec& spec) {
  spec.validate();
  RewardSurface s;
  s.cells = enumerate(spec);
  parallel_for(s.cells.size(), [&](std::size_t i) {
    auto& c = s.cells[i];
    try {
      c.j_per_hr = limit_cycle_average_reward(bp, rw, t_out_c, c.t_on_c, c.t_off_c, spec.gap_c);
    } catch (const DomainError&) {
      c.j_per_hr.reset();
    }
  });
  pick_argmax(s);
  return s;
}

RewardSurface grid_search_simulated(const Environment& env, const GridSpec& spec, double eval_days) {
  spec.validate();
  if (!(eval_days > 0.0)) throw ConfigError("evaluation duration must be positive");
  RewardSurface s;
  s.cells = enumerate(spec);
  const double hot_min = env.weather.min_c() + env.building.heater_lift_k();
  parallel_for(s.cells.size(), [&](std::size_t i) {
    auto& c = s.cells[i];
    // Pairs that cannot cycle at the coldest outdoor temperature are missing.
    if (!(c.t_on_c > env.weather.max_c() && c.t_off_c < hot_min)) return;
    const RolloutResult r =
        run_policy(env, make_threshold_policy(c.t_on_c, c.t_off_c), eval_days * 86400.0, 0);
    c.j_per_hr = r.avg_reward_per_hr;
  });
  pick_argmax(s);
  return s;
}

RewardSurface grid_search(const Environment& env, const GridSpec& spec, double eval_days) {
  if (env.weather.is_constant() && !env.sim.force_numeric && env.sim.control_tick_s == 0.0) {
    return grid_search_analytic(env.building, env.rewards, env.weather.at(0.0), spec);
  }
  return grid_search_simulated(env, spec, eval_days);
}

void write_surface_csv(std::ostream& out, const RewardSurface& surface) {
  out << kSurfaceHeader << '\n';
  for (const auto& c : surface.cells) {
    out << format_double(c.t_on_c) << ',' << format_double(c.t_off_c) << ',';
    if (c.j_per_hr) out << format_double(*c.j_per_hr);
    out << '\n';
  }
}

}  // namespace etrl
