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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "etrl/oracle.hpp"

using namespace etrl;

namespace {

constexpr double kTau = 2.0e6 / 325.0;

// Cycle average by Simpson integration of the closed-form trajectory: an
// oracle independent of the exact antiderivatives used by limit_cycle.
double simpson_cycle_j(const RewardWeights& rw, double on, double off) {
  const double hot = 30.0, cold = -10.0;
  const double t_on = kTau * std::log((hot - on) / (hot - off));
  const double t_off = kTau * std::log((off - cold) / (on - cold));
  auto comfort = [&](double t0, double tinf, double d) {
    const int n = 20000;
    auto f = [&](double t) {
      const double T = tinf + (t0 - tinf) * std::exp(-t / kTau);
      return (T - rw.desired_temperature_c) * (T - rw.desired_temperature_c);
    };
    double acc = f(0.0) + f(d);
    for (int k = 1; k < n; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(d * k / n);
    return acc * d / (3.0 * n);
  };
  const double r = 2 * rw.switch_penalty + rw.energy_rate * t_on +
                   rw.comfort_rate * (comfort(on, hot, t_on) + comfort(off, cold, t_off));
  return r / (t_on + t_off) * 3600.0;
}

}  // namespace

TEST(LimitCycle, DurationsForReferencePair) {
  const LimitCycle c = limit_cycle(BuildingParams{}, RewardWeights{}, -10.0, 12.5, 17.5);
  EXPECT_NEAR(c.t_on_s, 2070.6, 0.05);
  EXPECT_NEAR(c.t_off_s, 1234.9, 0.05);
  EXPECT_NEAR(c.period_s(), 3305.5, 0.1);
}

TEST(LimitCycle, MatchesSimpsonQuadrature) {
  const RewardWeights rw;
  for (double on : {9.0, 12.5, 14.0}) {
    for (double off : {15.5, 17.5, 21.0}) {
      const double j = limit_cycle_average_reward(BuildingParams{}, rw, -10.0, on, off);
      EXPECT_NEAR(j, simpson_cycle_j(rw, on, off), 1e-9 * std::abs(j));
    }
  }
}

TEST(LimitCycle, DutyCycleOnlyEnergy) {
  RewardWeights rw;
  rw.comfort_rate = 0.0;
  rw.switch_penalty = 0.0;
  const LimitCycle c = limit_cycle(BuildingParams{}, rw, -10.0, 12.5, 17.5);
  EXPECT_NEAR(c.j_per_hr / 3600.0, rw.energy_rate * c.t_on_s / c.period_s(), 1e-15);
}

TEST(LimitCycle, InfeasibleThrows) {
  const BuildingParams bp;
  const RewardWeights rw;
  EXPECT_THROW(limit_cycle(bp, rw, -10.0, -11.0, 17.5), DomainError);
  EXPECT_THROW(limit_cycle(bp, rw, -10.0, 12.5, 12.55), DomainError);
  EXPECT_THROW(limit_cycle(bp, rw, -10.0, 12.5, 30.0), DomainError);
  EXPECT_NO_THROW(limit_cycle(bp, rw, -10.0, 12.5, 12.6));
}

TEST(GridSearch, ArgmaxNearReferencePair) {
  const RewardSurface s = grid_search_analytic(BuildingParams{}, RewardWeights{}, -10.0, GridSpec{});
  EXPECT_LE(std::abs(s.argmax_on_c - 12.5), 0.5 + 1e-12);
  EXPECT_LE(std::abs(s.argmax_off_c - 17.5), 0.5 + 1e-12);
  for (const auto& c : s.cells) {
    if (c.j_per_hr) EXPECT_LE(*c.j_per_hr, s.j_max_per_hr);
  }
  EXPECT_EQ(s.cells.size(), 15u * 15u - 1u);  // (15, 15) violates the gap
}

TEST(GridSearch, UnimodalThroughArgmax) {
  const RewardSurface s = grid_search_analytic(BuildingParams{}, RewardWeights{}, -10.0, GridSpec{});
  // Along the argmax row and column, J is non-increasing moving away from it.
  auto check_line = [&](bool row) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& c : s.cells) {
      if (!c.j_per_hr) continue;
      if (row && c.t_on_c == s.argmax_on_c) pts.push_back({c.t_off_c, *c.j_per_hr});
      if (!row && c.t_off_c == s.argmax_off_c) pts.push_back({c.t_on_c, *c.j_per_hr});
    }
    const double peak = row ? s.argmax_off_c : s.argmax_on_c;
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].first <= peak) EXPECT_GE(pts[i].second, pts[i - 1].second);
      else EXPECT_LE(pts[i].second, pts[i - 1].second);
    }
  };
  check_line(true);
  check_line(false);
}

TEST(GridSearch, SingletonGrid) {
  GridSpec g{12.5, 12.5 + 1e-9, 17.5, 17.5 + 1e-9, 0.5, 0.1};
  const RewardSurface s = grid_search_analytic(BuildingParams{}, RewardWeights{}, -10.0, g);
  EXPECT_EQ(s.cells.size(), 1u);
  EXPECT_EQ(s.argmax_on_c, 12.5);
  EXPECT_EQ(s.argmax_off_c, 17.5);
}

TEST(GridSearch, TiesBreakTowardSmallestPair) {
  RewardWeights rw;
  rw.switch_penalty = rw.energy_rate = rw.comfort_rate = 0.0;
  const RewardSurface s = grid_search_analytic(BuildingParams{}, rw, -10.0, GridSpec{});
  EXPECT_EQ(s.argmax_on_c, 8.0);
  EXPECT_EQ(s.argmax_off_c, 15.0);
}

TEST(GridSearch, SwitchPenaltyLengthensCycle) {
  const BuildingParams bp;
  double last_period = 0.0;
  for (double rsw : {-0.2, -0.8, -3.0}) {
    RewardWeights rw;
    rw.switch_penalty = rsw;
    const RewardSurface s = grid_search_analytic(bp, rw, -10.0, GridSpec{});
    const double period = limit_cycle(bp, rw, -10.0, s.argmax_on_c, s.argmax_off_c).period_s();
    EXPECT_GE(period, last_period);
    last_period = period;
  }
}

TEST(GridSearch, ComfortOnlyIsNearlySymmetric) {
  RewardWeights rw;
  rw.energy_rate = 0.0;
  const RewardSurface s = grid_search_analytic(BuildingParams{}, rw, -10.0, GridSpec{});
  const double mid = 0.5 * (s.argmax_on_c + s.argmax_off_c);
  EXPECT_LE(std::abs(mid - rw.desired_temperature_c), 0.5 + 1e-12);
}

TEST(GridSearch, SimulatedAgreesWithAnalyticOnSubgrid) {
  const Environment env = Environment::make(BuildingParams{}, ConstantWeather{-10.0}, RewardWeights{});
  const GridSpec g{11.0, 14.0, 16.0, 19.0, 1.5, 0.1};
  const RewardSurface an = grid_search_analytic(env.building, env.rewards, -10.0, g);
  const RewardSurface si = grid_search_simulated(env, g, 10.0);
  ASSERT_EQ(an.cells.size(), si.cells.size());
  for (std::size_t i = 0; i < an.cells.size(); ++i) {
    EXPECT_NEAR(*si.cells[i].j_per_hr, *an.cells[i].j_per_hr, 0.005 * std::abs(*an.cells[i].j_per_hr));
  }
  EXPECT_EQ(grid_search(env, g, 10.0).j_max_per_hr, an.j_max_per_hr);
}

TEST(GridSearch, SimulatedIsOrderIndependent) {
  const Environment env =
      Environment::make(BuildingParams{}, SinusoidWeather{-10.0, 5.0, 86400.0, 0.0}, RewardWeights{});
  const GridSpec g{12.0, 13.0, 16.5, 17.5, 0.5, 0.1};
  const RewardSurface a = grid_search_simulated(env, g, 2.0);
  setenv("ETRL_WORKERS", "1", 1);
  const RewardSurface b = grid_search_simulated(env, g, 2.0);
  unsetenv("ETRL_WORKERS");
  std::ostringstream sa, sb;
  write_surface_csv(sa, a);
  write_surface_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().substr(0, 24), "t_on_C,t_off_C,j_per_hr\n");
}

TEST(GridSearch, InvalidSpec) {
  EXPECT_THROW((GridSpec{15.0, 8.0, 15.0, 22.0, 0.5, 0.1}.validate()), ConfigError);
  EXPECT_THROW((GridSpec{8.0, 15.0, 15.0, 22.0, 0.0, 0.1}.validate()), ConfigError);
}
