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

#include "etrl/policies.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <string>

namespace etrl {

VectorXd features(const SystemState& s, const FeatureConfig& fc) {
  const double h = s.heater_on ? 1.0 : 0.0;
  VectorXd phi(fc.dim());
  phi[0] = 1.0 - h;
  phi[1] = h;
  if (fc.map == FeatureMap::OneHotOutdoor) {
    const double x = (s.t_out_c - fc.outdoor_ref_c) / fc.outdoor_scale_c;
    phi[2] = (1.0 - h) * x;
    phi[3] = h * x;
  }
  return phi;
}

namespace {

void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw ConfigError(std::string(what) + " has dimension " + std::to_string(got) + ", expected " +
                      std::to_string(want));
  }
}

void check_stochastic(const StochasticPolicyParams& p, const FeatureConfig& fc) {
  require_dim(p.mean_weights.size(), fc.dim(), "policy mean weights");
  if (!p.shared_std()) require_dim(p.log_std.size(), fc.dim(), "policy log-std weights");
}

}  // namespace

double StochasticPolicyParams::stddev(const VectorXd& phi) const {
  return std::exp(shared_std() ? log_std[0] : log_std.dot(phi));
}

double stochastic_sample(const StochasticPolicyParams& p, const SystemState& s, Rng& rng,
                         const FeatureConfig& fc) {
  check_stochastic(p, fc);
  const VectorXd phi = features(s, fc);
  std::normal_distribution<double> dist(p.mean(phi), p.stddev(phi));
  return dist(rng);
}

double stochastic_log_density(const StochasticPolicyParams& p, const SystemState& s, double a,
                              const FeatureConfig& fc) {
  check_stochastic(p, fc);
  const VectorXd phi = features(s, fc);
  const double sigma = p.stddev(phi);
  const double z = (a - p.mean(phi)) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

StochasticScore stochastic_score(const StochasticPolicyParams& p, const SystemState& s, double a,
                                 const FeatureConfig& fc) {
  check_stochastic(p, fc);
  const VectorXd phi = features(s, fc);
  const double sigma = p.stddev(phi);
  const double diff = a - p.mean(phi);
  const double var = sigma * sigma;
  const double std_term = diff * diff / var - 1.0;

  StochasticScore g;
  g.mean = (diff / var) * phi;
  if (p.shared_std()) {
    g.log_std = VectorXd::Constant(1, std_term);
  } else {
    g.log_std = std_term * phi;
  }
  return g;
}

double deterministic_action(const DeterministicPolicyParams& p, const SystemState& s,
                            const FeatureConfig& fc) {
  require_dim(p.weights.size(), fc.dim(), "policy weights");
  return p.weights.dot(features(s, fc));
}

VectorXd deterministic_gradient(const DeterministicPolicyParams& p, const SystemState& s,
                                const FeatureConfig& fc) {
  require_dim(p.weights.size(), fc.dim(), "policy weights");
  return features(s, fc);
}

double state_value(const CriticParams& c, const SystemState& s, const FeatureConfig& fc) {
  require_dim(c.v.size(), fc.dim(), "state-value weights");
  return c.v.dot(features(s, fc));
}

double compatible_q(const CriticParams& c, const DeterministicPolicyParams& p, const SystemState& s,
                    double a, const FeatureConfig& fc) {
  require_dim(c.w.size(), p.weights.size(), "advantage weights");
  const VectorXd grad = deterministic_gradient(p, s, fc);
  return (a - p.weights.dot(grad)) * grad.dot(c.w) + state_value(c, s, fc);
}

VectorXd compatible_q_grad_w(const CriticParams& c, const DeterministicPolicyParams& p,
                             const SystemState& s, double a, const FeatureConfig& fc) {
  require_dim(c.w.size(), p.weights.size(), "advantage weights");
  const VectorXd grad = deterministic_gradient(p, s, fc);
  return (a - p.weights.dot(grad)) * grad;
}

Policy make_stochastic_policy(StochasticPolicyParams p, FeatureConfig fc) {
  check_stochastic(p, fc);
  return [p = std::move(p), fc](const SystemState& s, Rng& rng) {
    return stochastic_sample(p, s, rng, fc);
  };
}

Policy make_deterministic_policy(DeterministicPolicyParams p, FeatureConfig fc) {
  require_dim(p.weights.size(), fc.dim(), "policy weights");
  return [p = std::move(p), fc](const SystemState& s, Rng&) { return deterministic_action(p, s, fc); };
}

Policy make_threshold_policy(double t_on_c, double t_off_c) {
  return [t_on_c, t_off_c](const SystemState& s, Rng&) { return s.heater_on ? t_off_c : t_on_c; };
}

namespace {

std::string theta_key(Eigen::Index i) {
  if (i == 0) return "theta_on";
  if (i == 1) return "theta_off";
  return "theta_" + std::to_string(i);
}

std::string sigma_key(Eigen::Index i) {
  return i == 0 ? "theta_sigma" : "theta_sigma_" + std::to_string(i);
}

// Collects `prefix<i>` entries (i = 0, 1, ...) until the first gap.
VectorXd collect(std::map<std::string, std::string>& kv, auto key_of) {
  std::vector<double> vals;
  for (Eigen::Index i = 0;; ++i) {
    auto it = kv.find(key_of(i));
    if (it == kv.end()) break;
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(it->second, &used));
      if (used != it->second.size()) throw std::invalid_argument(it->second);
    } catch (const std::logic_error&) {
      throw InputError("params: malformed value for '" + it->first + "'");
    }
    kv.erase(it);
  }
  return Eigen::Map<VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

}  // namespace

void write_params(std::ostream& out, const SavedParams& p) {
  for (Eigen::Index i = 0; i < p.theta.size(); ++i) {
    out << theta_key(i) << '=' << format_double(p.theta[i]) << '\n';
  }
  if (p.log_std) {
    for (Eigen::Index i = 0; i < p.log_std->size(); ++i) {
      out << sigma_key(i) << '=' << format_double((*p.log_std)[i]) << '\n';
    }
  } else {
    out << "theta_sigma=\n";
  }
  for (Eigen::Index i = 0; i < p.v.size(); ++i) out << 'v' << i << '=' << format_double(p.v[i]) << '\n';
  for (Eigen::Index i = 0; i < p.w.size(); ++i) out << 'w' << i << '=' << format_double(p.w[i]) << '\n';
  out << "jbar_per_hr=" << format_double(p.jbar_per_hr) << '\n';
}

SavedParams read_params(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("params line " + std::to_string(lineno) + ": expected key=value");
    }
    if (!kv.emplace(line.substr(0, eq), line.substr(eq + 1)).second) {
      throw InputError("params line " + std::to_string(lineno) + ": duplicate key");
    }
  }

  SavedParams p;
  if (auto it = kv.find("theta_sigma"); it != kv.end() && it->second.empty()) kv.erase(it);
  p.theta = collect(kv, theta_key);
  if (p.theta.size() < 2) throw InputError("params: theta_on and theta_off are required");
  VectorXd sigma = collect(kv, sigma_key);
  if (sigma.size() > 0) p.log_std = sigma;
  p.v = collect(kv, [](Eigen::Index i) { return "v" + std::to_string(i); });
  p.w = collect(kv, [](Eigen::Index i) { return "w" + std::to_string(i); });
  auto jit = kv.find("jbar_per_hr");
  if (jit != kv.end()) {
    try {
      p.jbar_per_hr = std::stod(jit->second);
    } catch (const std::logic_error&) {
      throw InputError("params: malformed value for 'jbar_per_hr'");
    }
    kv.erase(jit);
  }
  if (!kv.empty()) throw InputError("params: unknown key '" + kv.begin()->first + "'");
  return p;
}

SavedParams read_params_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open params file " + path.string());
  return read_params(in);
}

}  // namespace etrl
