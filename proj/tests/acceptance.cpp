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


// Acceptance run. One PASS/FAIL line per criterion; exit status is nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "etrl/config.hpp"
#include "etrl/experiments.hpp"
#include "etrl/learners.hpp"
#include "etrl/oracle.hpp"
#include "etrl/parallel.hpp"
#include "etrl/policies.hpp"

namespace fs = std::filesystem;
using namespace etrl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunConfig config(const char* name) { return load_config(fs::path(ETRL_SOURCE_DIR) / "configs" / name); }

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / fmt("etrl_acceptance_%d", static_cast<int>(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + ETRL_CLI + "\" " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// 1. Oracle optimum through the CLI.
Outcome oracle_optimum() {
  const fs::path out = scratch() / "grid";
  const std::string cfg = (fs::path(ETRL_SOURCE_DIR) / "configs" / "linear.ini").string();
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = run_cli("--config \"" + cfg + "\" --out \"" + out.string() + "\" grid-search");
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (rc != 0) return {false, fmt("grid-search exited with %d", rc)};
  const auto m = nlohmann::json::parse(slurp(out / "manifest.json"));
  const double on = m["oracle"]["argmax_on_c"], off = m["oracle"]["argmax_off_c"];
  const double j = m["oracle"]["j_max_per_hr"];
  const bool argmax_ok = std::abs(on - 12.5) <= 0.5 + 1e-9 && std::abs(off - 17.5) <= 0.5 + 1e-9;
  const auto& soft = m["soft_target"];
  const bool within10 = soft["within_10_percent"];
  // Outside the soft target the manifest has to carry the explanation.
  const bool documented = within10 || (soft.contains("note") && m["td_sweep"].size() == 3);
  std::string sweep;
  for (const auto& p : m["td_sweep"]) {
    sweep += fmt(" T_d=%g:(%g,%g) J=%.3f;", p["desired_temperature_c"].get<double>(),
                 p["argmax_on_c"].get<double>(), p["argmax_off_c"].get<double>(),
                 p["j_max_per_hr"].get<double>());
  }
  return {argmax_ok && documented && secs <= 10.0,
          fmt("argmax (%g, %g) J=%.4f unit/hr, cli %.3fs <= 10s; soft target %s (%.1f%% from -3.70)%s; sweep:",
              on, off, j, secs, within10 ? "met" : "missed, documented in manifest",
              100.0 * soft["relative_difference"].get<double>(), documented ? "" : " NOT DOCUMENTED") +
              sweep};
}

// 2. Analytic surface against a stepped 10-day simulation of every cell.
Outcome oracle_cross_validation() {
  const RunConfig cfg = config("linear.ini");
  const Environment env = cfg.environment();
  const RewardSurface an = grid_search_analytic(env.building, env.rewards, cfg.t_out_c, cfg.grid);
  Environment num = env;
  num.sim.force_numeric = true;
  const RewardSurface sim = grid_search_simulated(num, cfg.grid, 10.0);
  double worst = 0.0, worst_on = 0.0, worst_off = 0.0;
  std::size_t n = 0;
  bool feasibility_match = an.cells.size() == sim.cells.size();
  for (std::size_t i = 0; feasibility_match && i < an.cells.size(); ++i) {
    const auto& a = an.cells[i];
    const auto& s = sim.cells[i];
    if (a.j_per_hr.has_value() != s.j_per_hr.has_value()) feasibility_match = false;
    if (!a.j_per_hr || !s.j_per_hr) continue;
    ++n;
    const double e = rel(*s.j_per_hr, *a.j_per_hr);
    if (e > worst) worst = e, worst_on = a.t_on_c, worst_off = a.t_off_c;
  }
  return {feasibility_match && n > 0 && worst <= 0.005,
          fmt("%zu cells, max relative difference %.3g%% at (%g, %g) <= 0.5%%", n, 100 * worst, worst_on,
              worst_off)};
}

struct SeedRun {
  double on = 0, off = 0, sigma = 0, j = 0;
};

std::vector<SeedRun> train_seeds(const RunConfig& cfg, Algo algo, const RewardSurface& oracle) {
  std::vector<SeedRun> runs(5);
  parallel_for(runs.size(), [&](std::size_t i) {
    const std::uint64_t seed = i + 1;
    const TrainResult tr = train_experiment(cfg, algo, seed, 10.0);
    const RolloutResult ev = evaluate_experiment(cfg, tr.final_params, Control::Event, cfg.eval_days, seed);
    runs[i] = {tr.final_params.theta[0], tr.final_params.theta[1],
               tr.final_params.log_std ? std::exp((*tr.final_params.log_std)[0]) : 0.0,
               ev.avg_reward_per_hr};
  });
  (void)oracle;
  return runs;
}

template <class F>
double med_of(const std::vector<SeedRun>& r, F f) {
  std::vector<double> xs;
  for (const auto& x : r) xs.push_back(f(x));
  return median(xs);
}

// 3 and 4. Learner convergence, median over seeds 1..5.
Outcome convergence(Algo algo) {
  const RunConfig cfg = config("linear.ini");
  const RewardSurface oracle = oracle_surface(cfg);
  const auto runs = train_seeds(cfg, algo, oracle);
  const double on = med_of(runs, [](auto& r) { return r.on; });
  const double off = med_of(runs, [](auto& r) { return r.off; });
  const double j = med_of(runs, [](auto& r) { return r.j; });
  const double err = std::max(std::abs(on - oracle.argmax_on_c), std::abs(off - oracle.argmax_off_c));
  // J of the argmax policy itself; analytic for constant weather.
  const double j_ref = oracle.j_max_per_hr;
  const double jerr = rel(j, j_ref);
  bool pass = err <= 0.5 && jerr <= 0.02;
  std::string detail = fmt("median thresholds (%.3f, %.3f) vs argmax (%g, %g): %.3f <= 0.5; median J %.4f vs %.4f: %.2f%% <= 2%%",
                           on, off, oracle.argmax_on_c, oracle.argmax_off_c, err, j, j_ref, 100 * jerr);
  if (algo == Algo::Stochastic) {
    const double sigma = med_of(runs, [](auto& r) { return r.sigma; });
    pass = pass && sigma < 0.3;
    detail += fmt("; median sigma %.3f < 0.3", sigma);
  }
  return {pass, detail};
}

// 5. Event-triggered against fixed-interval learning.
Outcome event_vs_fixed() {
  const RunConfig cfg = config("linear.ini");
  const CompareReport r = compare_experiment(cfg, {1, 2, 3, 4, 5}, 10.0);
  const bool a = r.median_j_event > r.median_j_fixed_fixed;
  const bool b = r.median_j_fixed_event > r.median_j_fixed_fixed;
  const bool c = r.median_jbar_std_event < r.median_jbar_std_fixed;
  return {a && b && c,
          fmt("tick %gs; (a) J event %.4f > fixed/fixed %.4f %s; (b) fixed/event %.4f > fixed/fixed %s; "
              "(c) last-5-day Jbar std event %.4f < fixed %.4f %s",
              cfg.tick_s, r.median_j_event, r.median_j_fixed_fixed, a ? "ok" : "NO", r.median_j_fixed_event,
              b ? "ok" : "NO", r.median_jbar_std_event, r.median_jbar_std_fixed, c ? "ok" : "NO")};
}

// 6. Score and compatible-Q gradients against central differences.
Outcome gradient_checks() {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto u = [&](double lo, double hi) { return lo + (hi - lo) * U(rng); };
  double worst = 0.0;
  auto check = [&](double analytic, double fd) {
    const double e = std::abs(analytic - fd) / std::max({std::abs(analytic), std::abs(fd), 1e-3});
    worst = std::max(worst, e);
  };
  for (int k = 0; k < 1000; ++k) {
    FeatureConfig fc;
    if (k % 2) fc.map = FeatureMap::OneHotOutdoor;
    SystemState s;
    s.t_in_c = u(5, 25);
    s.t_out_c = u(-20, 5);
    s.heater_on = U(rng) < 0.5;
    const int dim = static_cast<int>(features(s, fc).size());

    StochasticPolicyParams sp;
    sp.mean_weights = VectorXd(dim);
    for (int j = 0; j < dim; ++j) sp.mean_weights[j] = u(8, 22);
    sp.log_std = VectorXd::Constant(1, u(std::log(0.1), std::log(2.0)));
    const double a = sp.mean(features(s, fc)) + u(-3, 3) * std::exp(sp.log_std[0]);
    const StochasticScore g = stochastic_score(sp, s, a, fc);
    const double h = 1e-5;
    for (int j = 0; j < dim; ++j) {
      auto hi = sp, lo = sp;
      hi.mean_weights[j] += h;
      lo.mean_weights[j] -= h;
      check(g.mean[j], (stochastic_log_density(hi, s, a, fc) - stochastic_log_density(lo, s, a, fc)) / (2 * h));
    }
    {
      auto hi = sp, lo = sp;
      hi.log_std[0] += h;
      lo.log_std[0] -= h;
      check(g.log_std[0], (stochastic_log_density(hi, s, a, fc) - stochastic_log_density(lo, s, a, fc)) / (2 * h));
    }

    DeterministicPolicyParams dp{sp.mean_weights};
    CriticParams c;
    c.v = VectorXd(dim);
    c.w = VectorXd(dim);
    for (int j = 0; j < dim; ++j) c.v[j] = u(-5, 5), c.w[j] = u(-5, 5);
    const double b = deterministic_action(dp, s, fc) + u(-3, 3);
    const VectorXd gw = compatible_q_grad_w(c, dp, s, b, fc);
    for (int j = 0; j < dim; ++j) {
      auto hi = c, lo = c;
      hi.w[j] += h;
      lo.w[j] -= h;
      check(gw[j], (compatible_q(hi, dp, s, b, fc) - compatible_q(lo, dp, s, b, fc)) / (2 * h));
    }
    // Action gradient used by the actor: grad_theta mu^T w.
    const double ga = deterministic_gradient(dp, s, fc).dot(c.w);
    check(ga, (compatible_q(c, dp, s, b + h, fc) - compatible_q(c, dp, s, b - h, fc)) / (2 * h));
  }
  return {worst <= 1e-5, fmt("1000 tuples, worst relative error %.2e <= 1e-5", worst)};
}

// 7. Critic tracking with the actor frozen, default alpha_j.
Outcome critic_tracking() {
  const RunConfig cfg = config("linear.ini");
  const Environment env = cfg.environment();
  std::vector<double> det(5), sto(5);
  parallel_for(5, [&](std::size_t i) {
    TrainConfig c = cfg.train;
    c.seed = i + 1;
    c.duration_days = 5.0;
    c.alpha_theta = 0.0;
    c.exploration.std0_c = 0.0;
    const TrainResult d = train_deterministic(env, c);
    det[i] = rel(d.final_params.jbar_per_hr / 3600.0, d.total_reward / d.total_time_s);
    const TrainResult s = train_stochastic(env, c);
    sto[i] = rel(s.final_params.jbar_per_hr / 3600.0, s.total_reward / s.total_time_s);
  });
  const double dmax = *std::max_element(det.begin(), det.end());
  const double smax = *std::max_element(sto.begin(), sto.end());
  const double smed = median(sto);
  return {dmax <= 0.02 && smax <= 0.02,
          fmt("seeds 1-5, 5 days: deterministic max %.3f%% %s; stochastic (sigma 1) max %.2f%% median %.2f%% %s",
              100 * dmax, dmax <= 0.02 ? "ok" : "NO", 100 * smax, 100 * smed, smax <= 0.02 ? "ok" : "NO")};
}

// 8. Byte-identical artifacts from repeated CLI runs.
Outcome determinism() {
  const std::string cfg = (fs::path(ETRL_SOURCE_DIR) / "configs" / "linear.ini").string();
  std::string detail;
  bool pass = true;
  for (const char* algo : {"stochastic", "deterministic", "fixed-interval"}) {
    fs::path dirs[2] = {scratch() / fmt("det_%s_a", algo), scratch() / fmt("det_%s_b", algo)};
    for (const auto& d : dirs) {
      const int rc = run_cli("--config \"" + cfg + "\" --out \"" + d.string() + "\" --seed 7 --days 3 train --algo " + algo);
      if (rc != 0) return {false, fmt("train --algo %s exited with %d", algo, rc)};
    }
    for (const char* f : {"training_log.csv", "trace.csv", "eval_trace.csv", "params.txt"}) {
      const std::string x = slurp(dirs[0] / f), y = slurp(dirs[1] / f);
      if (x.empty() || x != y) {
        pass = false;
        detail += fmt(" %s/%s differs;", algo, f);
      }
    }
  }
  return {pass, "seed 7, 3 days, three algorithms: training_log.csv, trace.csv, eval_trace.csv, params.txt " +
                    std::string(pass ? "identical" : "NOT identical:") + detail};
}

// 9. Deterministic learner under sinusoidal weather.
Outcome synthetic_weather() {
  const RunConfig cfg = config("sinusoid.ini");
  const RewardSurface oracle = oracle_surface(cfg);
  const double days = 10.0, window_from = 8.0 * 86400.0;
  struct R {
    double on = 0, off = 0, spread = 0;
  };
  std::vector<R> runs(5);
  parallel_for(runs.size(), [&](std::size_t i) {
    const TrainResult tr = train_experiment(cfg, Algo::Deterministic, i + 1, days);
    const VectorXd& fin = tr.final_params.theta;
    double spread = 0.0;
    for (const auto& rec : tr.history) {
      if (rec.t_s < window_from) continue;
      for (int j = 0; j < 2; ++j) spread = std::max(spread, std::abs(rec.theta[j] - fin[j]));
    }
    runs[i] = {fin[0], fin[1], spread};
  });
  std::vector<double> on, off;
  double spread = 0.0;
  for (const auto& r : runs) on.push_back(r.on), off.push_back(r.off), spread = std::max(spread, r.spread);
  const double mon = median(on), moff = median(off);
  const double err = std::max(std::abs(mon - oracle.argmax_on_c), std::abs(moff - oracle.argmax_off_c));
  return {spread <= 0.5 && err <= 0.5,
          fmt("seeds 1-5: max drift over the final 2 days %.3f <= 0.5; median thresholds (%.3f, %.3f) vs "
              "simulated argmax (%g, %g) J=%.4f: %.3f <= 0.5",
              spread, mon, moff, oracle.argmax_on_c, oracle.argmax_off_c, oracle.j_max_per_hr, err)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
    double budget_s;  // 0 when the criterion has no runtime bound
  };
  const std::vector<Criterion> criteria = {
      {"oracle optimum", oracle_optimum, 10.0},
      {"oracle cross-validation", oracle_cross_validation, 120.0},
      {"deterministic convergence", [] { return convergence(Algo::Deterministic); }, 60.0},
      {"stochastic convergence", [] { return convergence(Algo::Stochastic); }, 0.0},
      {"event vs fixed interval", event_vs_fixed, 0.0},
      {"gradient checks", gradient_checks, 0.0},
      {"critic tracking", critic_tracking, 0.0},
      {"determinism", determinism, 0.0},
      {"synthetic weather", synthetic_weather, 0.0},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.3fs", secs);
    if (c.budget_s > 0) {
      timing += fmt(" <= %gs", c.budget_s);
      if (secs > c.budget_s) o.pass = false, timing += " EXCEEDED";
    }
    if (!o.pass) ++failures;
    std::printf("%s %zu %s [%s]: %s\n", o.pass ? "PASS" : "FAIL", i + 1, c.name, timing.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(scratch());
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
