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

// etrl: event-triggered RL thermostat experiments.

#include <cstdint>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "etrl/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

void print_summary(const std::string& manifest) {
  const auto m = nlohmann::json::parse(manifest);
  if (m.contains("oracle")) {
    const auto& o = m["oracle"];
    std::cout << "oracle argmax (" << o["argmax_on_c"] << ", " << o["argmax_off_c"]
              << ") J = " << o["j_max_per_hr"] << " unit/hr [" << o["method"].get<std::string>()
              << "]\n";
  }
  if (m.contains("soft_target") && m["soft_target"].contains("note")) {
    std::cout << "note: " << m["soft_target"]["note"].get<std::string>() << '\n';
  }
  if (m.contains("summary")) std::cout << m["summary"].dump(2) << '\n';
  if (m.contains("outcomes") && m["command"] != "compare") {
    for (const auto& r : m["outcomes"]) {
      std::cout << "seed " << r["seed"] << ": theta = " << r["final_params"]["theta"].dump();
      if (r["final_params"].contains("sigma_c")) std::cout << " sigma = " << r["final_params"]["sigma_c"];
      std::cout << " J = " << r["evaluated_j_per_hr"] << " unit/hr\n";
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered average-reward RL for thermostat switching thresholds"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> days;
  app.add_option("--config", config_path, "Configuration file (defaults to the built-in linear setup)")
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Random seed");
  app.add_option("--days", days, "Simulated days (training or evaluation)");

  auto* grid = app.add_subcommand("grid-search", "Brute-force oracle over constant threshold pairs");

  auto* train = app.add_subcommand("train", "Train a threshold policy");
  std::string algo = "deterministic";
  train->add_option("--algo", algo, "stochastic | deterministic | fixed-interval")
      ->check(CLI::IsMember({"stochastic", "deterministic", "fixed-interval"}));

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate saved parameters on-policy");
  std::string params_path;
  std::string control = "event";
  evaluate->add_option("--params", params_path, "Parameter file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--control", control, "event | fixed")->check(CLI::IsMember({"event", "fixed"}));

  auto* compare = app.add_subcommand("compare", "Event-triggered vs fixed-interval learning over seeds");
  std::optional<std::uint64_t> n_seeds;
  compare->add_option("--seeds", n_seeds, "Number of seeds, run as 1..N (default: config seeds)");

  auto* simulate = app.add_subcommand("simulate", "Dense rollout of a threshold policy");
  double t_on = 12.5;
  double t_off = 17.5;
  std::string sim_params;
  simulate->add_option("--on", t_on, "Switch-ON threshold (C)");
  simulate->add_option("--off", t_off, "Switch-OFF threshold (C)");
  simulate->add_option("--params", sim_params, "Parameter file (overrides --on/--off)")
      ->check(CLI::ExistingFile);
  simulate->add_option("--control", control, "event | fixed")->check(CLI::IsMember({"event", "fixed"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    etrl::RunConfig cfg;
    if (!config_path.empty()) cfg = etrl::load_config(config_path);
    const std::uint64_t s = seed.value_or(cfg.train.seed);
    auto out = [&](const char* name) { return out_dir.empty() ? std::string("out/") + name : out_dir; };

    std::string manifest;
    if (*grid) {
      manifest = etrl::run_grid_search(cfg, out("grid-search"));
    } else if (*train) {
      manifest = etrl::run_train(cfg, etrl::parse_algo(algo), s, days.value_or(cfg.train.duration_days),
                                 out("train"));
    } else if (*evaluate) {
      manifest = etrl::run_evaluate(cfg, params_path, etrl::parse_control(control),
                                    days.value_or(cfg.eval_days), s, out("evaluate"));
    } else if (*compare) {
      std::vector<std::uint64_t> seeds = cfg.seeds;
      if (n_seeds) {
        seeds.resize(*n_seeds);
        std::iota(seeds.begin(), seeds.end(), std::uint64_t{1});
      }
      manifest = etrl::run_compare(cfg, seeds, days.value_or(cfg.train.duration_days), out("compare"));
    } else if (*simulate) {
      std::optional<std::filesystem::path> p;
      if (!sim_params.empty()) p = sim_params;
      manifest = etrl::run_simulate(cfg, p, t_on, t_off, etrl::parse_control(control),
                                    days.value_or(cfg.eval_days), s, out("simulate"));
    }
    print_summary(manifest);
    return 0;
  } catch (const etrl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const etrl::InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
