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

#include "etrl/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace etrl {

namespace {

struct ValueError {
  std::string what;
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x)) {
    throw ValueError{"expected a finite number, got '" + std::string(v) + "'"};
  }
  return x;
}

std::uint64_t parse_u64(std::string_view v) {
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ValueError{"expected a non-negative integer, got '" + std::string(v) + "'"};
  }
  return x;
}

bool parse_bool(std::string_view v) {
  if (v == "true") return true;
  if (v == "false") return false;
  throw ValueError{"expected true or false, got '" + std::string(v) + "'"};
}

template <typename T, typename F>
std::vector<T> parse_list(std::string_view v, F item) {
  std::vector<T> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(item(trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T, typename F>
std::string join(const std::vector<T>& xs, F fmt) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += fmt(xs[i]);
  }
  return s;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

Field num(std::string sec, std::string key, double RunConfig::*m) {
  return {std::move(sec), std::move(key), [m](RunConfig& c, std::string_view v) { c.*m = parse_number(v); },
          [m](const RunConfig& c) { return format_double(c.*m); }};
}

template <typename Get>
Field num_at(std::string sec, std::string key, Get ref) {
  return {std::move(sec), std::move(key),
          [ref](RunConfig& c, std::string_view v) { ref(c) = parse_number(v); },
          [ref](const RunConfig& c) { return format_double(ref(const_cast<RunConfig&>(c))); }};
}

const char* weather_name(WeatherKind k) {
  switch (k) {
    case WeatherKind::Constant: return "constant";
    case WeatherKind::Sinusoid: return "sinusoid";
    case WeatherKind::Trace: return "trace";
  }
  return "constant";
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(num("building", "heat_capacity_kj_per_k", &RunConfig::heat_capacity_kj_per_k));
    f.push_back(num("building", "conductance_w_per_k", &RunConfig::conductance_w_per_k));
    f.push_back(num("building", "heater_power_kw", &RunConfig::heater_power_kw));

    f.push_back({"weather", "type",
                 [](RunConfig& c, std::string_view v) {
                   if (v == "constant") c.weather_kind = WeatherKind::Constant;
                   else if (v == "sinusoid") c.weather_kind = WeatherKind::Sinusoid;
                   else if (v == "trace") c.weather_kind = WeatherKind::Trace;
                   else throw ValueError{"expected constant, sinusoid or trace, got '" + std::string(v) + "'"};
                 },
                 [](const RunConfig& c) { return std::string(weather_name(c.weather_kind)); }});
    f.push_back(num("weather", "t_out_c", &RunConfig::t_out_c));
    f.push_back(num("weather", "mean_c", &RunConfig::mean_c));
    f.push_back(num("weather", "amplitude_c", &RunConfig::amplitude_c));
    f.push_back(num("weather", "period_h", &RunConfig::period_h));
    f.push_back(num("weather", "phase_h", &RunConfig::phase_h));
    f.push_back({"weather", "trace_file",
                 [](RunConfig& c, std::string_view v) { c.trace_file = std::string(v); },
                 [](const RunConfig& c) { return c.trace_file; }});

    f.push_back(num("rewards", "switch_penalty", &RunConfig::switch_penalty));
    f.push_back(num("rewards", "energy_per_hr", &RunConfig::energy_per_hr));
    f.push_back(num("rewards", "comfort_per_hr", &RunConfig::comfort_per_hr));
    f.push_back(num("rewards", "desired_temperature_c", &RunConfig::desired_temperature_c));

    f.push_back(num("sim", "step_s", &RunConfig::step_s));
    f.push_back(num("sim", "event_tol_s", &RunConfig::event_tol_s));
    f.push_back(num("sim", "event_temp_tol_c", &RunConfig::event_temp_tol_c));
    f.push_back(num("sim", "max_dwell_h", &RunConfig::max_dwell_h));
    f.push_back(num("sim", "min_dwell_s", &RunConfig::min_dwell_s));
    f.push_back({"sim", "force_numeric",
                 [](RunConfig& c, std::string_view v) { c.force_numeric = parse_bool(v); },
                 [](const RunConfig& c) { return std::string(c.force_numeric ? "true" : "false"); }});
    f.push_back(num("sim", "initial_t_in_c", &RunConfig::initial_t_in_c));
    f.push_back(num("sim", "band_margin_c", &RunConfig::band_margin_c));
    f.push_back(num("sim", "gap_c", &RunConfig::gap_c));

    auto tr = [](auto member) {
      return [member](RunConfig& c) -> double& { return c.train.*member; };
    };
    f.push_back(num_at("train", "alpha_j", tr(&TrainConfig::alpha_j)));
    f.push_back(num_at("train", "alpha_v", tr(&TrainConfig::alpha_v)));
    f.push_back(num_at("train", "alpha_w", tr(&TrainConfig::alpha_w)));
    f.push_back(num_at("train", "alpha_theta", tr(&TrainConfig::alpha_theta)));
    f.push_back(num_at("train", "lambda_v", tr(&TrainConfig::lambda_v)));
    f.push_back(num_at("train", "lambda_theta", tr(&TrainConfig::lambda_theta)));
    f.push_back(num_at("train", "explore_std0_c",
                       [](RunConfig& c) -> double& { return c.train.exploration.std0_c; }));
    f.push_back(num_at("train", "explore_decay",
                       [](RunConfig& c) -> double& { return c.train.exploration.decay; }));
    f.push_back(num_at("train", "init_theta_on_c", tr(&TrainConfig::init_theta_on_c)));
    f.push_back(num_at("train", "init_theta_off_c", tr(&TrainConfig::init_theta_off_c)));
    f.push_back(num_at("train", "init_sigma_c", tr(&TrainConfig::init_sigma_c)));
    f.push_back(num_at("train", "sigma_min_c", tr(&TrainConfig::sigma_min_c)));
    f.push_back(num_at("train", "sigma_max_c", tr(&TrainConfig::sigma_max_c)));
    f.push_back({"train", "per_mode_sigma",
                 [](RunConfig& c, std::string_view v) { c.train.per_mode_sigma = parse_bool(v); },
                 [](const RunConfig& c) { return std::string(c.train.per_mode_sigma ? "true" : "false"); }});
    f.push_back({"train", "features",
                 [](RunConfig& c, std::string_view v) {
                   if (v == "onehot") c.train.features.map = FeatureMap::OneHot;
                   else if (v == "onehot_outdoor") c.train.features.map = FeatureMap::OneHotOutdoor;
                   else throw ValueError{"expected onehot or onehot_outdoor, got '" + std::string(v) + "'"};
                 },
                 [](const RunConfig& c) {
                   return std::string(c.train.features.map == FeatureMap::OneHot ? "onehot" : "onehot_outdoor");
                 }});
    f.push_back(num_at("train", "outdoor_ref_c",
                       [](RunConfig& c) -> double& { return c.train.features.outdoor_ref_c; }));
    f.push_back(num_at("train", "outdoor_scale_c",
                       [](RunConfig& c) -> double& { return c.train.features.outdoor_scale_c; }));
    f.push_back(num_at("train", "duration_days", tr(&TrainConfig::duration_days)));
    f.push_back({"train", "seed",
                 [](RunConfig& c, std::string_view v) { c.train.seed = parse_u64(v); },
                 [](const RunConfig& c) { return std::to_string(c.train.seed); }});
    f.push_back(num_at("train", "theta_min_c", tr(&TrainConfig::theta_min_c)));
    f.push_back(num_at("train", "theta_max_c", tr(&TrainConfig::theta_max_c)));
    f.push_back(num("train", "tick_s", &RunConfig::tick_s));

    auto gr = [](auto member) {
      return [member](RunConfig& c) -> double& { return c.grid.*member; };
    };
    f.push_back(num_at("grid", "on_lo_c", gr(&GridSpec::on_lo_c)));
    f.push_back(num_at("grid", "on_hi_c", gr(&GridSpec::on_hi_c)));
    f.push_back(num_at("grid", "off_lo_c", gr(&GridSpec::off_lo_c)));
    f.push_back(num_at("grid", "off_hi_c", gr(&GridSpec::off_hi_c)));
    f.push_back(num_at("grid", "step_c", gr(&GridSpec::step_c)));
    f.push_back(num_at("grid", "gap_c", gr(&GridSpec::gap_c)));
    f.push_back(num("grid", "eval_days", &RunConfig::grid_eval_days));

    f.push_back({"run", "seeds",
                 [](RunConfig& c, std::string_view v) {
                   c.seeds = parse_list<std::uint64_t>(v, parse_u64);
                 },
                 [](const RunConfig& c) {
                   return join(c.seeds, [](std::uint64_t s) { return std::to_string(s); });
                 }});
    f.push_back(num("run", "eval_days", &RunConfig::eval_days));
    f.push_back(num("run", "jbar_window_days", &RunConfig::jbar_window_days));
    f.push_back({"run", "td_sweep_c",
                 [](RunConfig& c, std::string_view v) {
                   c.td_sweep_c = parse_list<double>(v, parse_number);
                 },
                 [](const RunConfig& c) { return join(c.td_sweep_c, format_double); }});
    return f;
  }();
  return table;
}

const Field* find_field(std::string_view section, std::string_view key) {
  for (const auto& f : fields()) {
    if (f.section == section && f.key == key) return &f;
  }
  return nullptr;
}

bool known_section(std::string_view section) {
  for (const auto& f : fields()) {
    if (f.section == section) return true;
  }
  return false;
}

std::filesystem::path resolve(const RunConfig& c) {
  std::filesystem::path p(c.trace_file);
  return p.is_absolute() ? p : c.base_dir / p;
}

}  // namespace

BuildingParams RunConfig::building() const {
  return {heat_capacity_kj_per_k * 1e3, conductance_w_per_k, heater_power_kw * 1e3};
}

RewardWeights RunConfig::rewards() const {
  return {switch_penalty, energy_per_hr / kSecondsPerHour, comfort_per_hr / kSecondsPerHour,
          desired_temperature_c};
}

SimOptions RunConfig::sim() const {
  SimOptions o;
  o.step_s = step_s;
  o.event_tol_s = event_tol_s;
  o.event_temp_tol_c = event_temp_tol_c;
  o.max_dwell_s = max_dwell_h * kSecondsPerHour;
  o.min_dwell_s = min_dwell_s;
  o.force_numeric = force_numeric;
  return o;
}

WeatherModel RunConfig::weather() const {
  switch (weather_kind) {
    case WeatherKind::Constant:
      return ConstantWeather{t_out_c};
    case WeatherKind::Sinusoid:
      return SinusoidWeather{mean_c, amplitude_c, period_h * kSecondsPerHour, phase_h * kSecondsPerHour};
    case WeatherKind::Trace:
      return WeatherModel::from_csv(resolve(*this));
  }
  return ConstantWeather{t_out_c};
}

Environment RunConfig::environment() const {
  return Environment::make(building(), weather(), rewards(), sim(), initial_t_in_c, band_margin_c,
                           gap_c);
}

void RunConfig::validate() const {
  try {
    building().validate();
    rewards().validate();
    sim().validate();
    train.validate();
    grid.validate();
    if (weather_kind == WeatherKind::Trace) {
      if (trace_file.empty()) throw ConfigError("[weather] trace_file is required for type = trace");
      if (!std::filesystem::exists(resolve(*this))) {
        throw ConfigError("[weather] trace_file not found: " + resolve(*this).string());
      }
    }
    if (!(tick_s > 0.0)) throw ConfigError("[train] tick_s must be positive");
    if (!(grid_eval_days > 0.0)) throw ConfigError("[grid] eval_days must be positive");
    if (!(eval_days > 0.0)) throw ConfigError("[run] eval_days must be positive");
    if (!(jbar_window_days > 0.0)) throw ConfigError("[run] jbar_window_days must be positive");
    if (seeds.empty()) throw ConfigError("[run] seeds must not be empty");
    if (td_sweep_c.empty()) throw ConfigError("[run] td_sweep_c must not be empty");
    // Builds the environment so weather-derived checks (band, trace contents) run.
    environment().validate();
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
}

bool RunConfig::operator==(const RunConfig& o) const {
  for (const auto& f : fields()) {
    if (f.get(*this) != f.get(o)) return false;
  }
  return true;
}

RunConfig parse_config(std::istream& in, const std::string& source,
                       const std::filesystem::path& base_dir) {
  RunConfig cfg;
  cfg.base_dir = base_dir;
  std::string section;
  std::set<std::pair<std::string, std::string>> seen;
  std::string raw;
  for (int lineno = 1; std::getline(in, raw); ++lineno) {
    auto fail = [&](const std::string& msg) {
      throw ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
    };
    std::string_view line = raw;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(section)) fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (section.empty()) fail("key '" + key + "' outside of any section");
    const Field* f = find_field(section, key);
    if (!f) fail("unknown key '" + key + "' in [" + section + "]");
    if (!seen.insert({section, key}).second) fail("duplicate key '" + key + "' in [" + section + "]");
    try {
      f->set(cfg, value);
    } catch (const ValueError& e) {
      fail(key + ": " + e.what);
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string(), path.parent_path());
}

void write_config(std::ostream& out, const RunConfig& cfg) {
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(cfg) << '\n';
  }
}

std::string config_to_string(const RunConfig& cfg) {
  std::ostringstream s;
  write_config(s, cfg);
  return s.str();
}

}  // namespace etrl
