// Copyright 2026 The pssf Authors
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

#include "pssf/planner.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pssf {

ExternalRollout parse_external_rollout(const std::string& content) {
  std::istringstream iss(content);
  std::string line;
  int line_no = 0;
  ExternalRollout out;
  bool saw_header = false;

  while (std::getline(iss, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream fields(line);
    if (!saw_header) {
      std::string version;
      if (!(fields >> version)) continue;  // blank line before header
      if (version != kRolloutFormatVersion) {
        throw RolloutError("line " + std::to_string(line_no) +
                           ": expected header '" +
                           std::string(kRolloutFormatVersion) + "'");
      }
      std::string kv;
      int n = -1, m = -1, horizon = -1;
      while (fields >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          throw RolloutError("line " + std::to_string(line_no) +
                             ": malformed header field '" + kv + "'");
        }
        const std::string key = kv.substr(0, eq);
        const int value = std::stoi(kv.substr(eq + 1));
        if (key == "n") {
          n = value;
        } else if (key == "m") {
          m = value;
        } else if (key == "T") {
          horizon = value;
        } else {
          throw RolloutError("line " + std::to_string(line_no) +
                             ": unknown header field '" + key + "'");
        }
      }
      if (n <= 0 || m <= 0 || horizon <= 0) {
        throw RolloutError("line " + std::to_string(line_no) +
                           ": header needs n=, m=, T= positive");
      }
      out.state_dim = n;
      out.input_dim = m;
      out.horizon = horizon;
      saw_header = true;
      continue;
    }

    std::vector<double> values;
    double v;
    while (fields >> v) values.push_back(v);
    if (values.empty()) continue;
    const std::size_t expected =
        4 + static_cast<std::size_t>(out.state_dim + out.input_dim);
    if (values.size() != expected) {
      throw RolloutError("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(expected) + " fields, got " +
                         std::to_string(values.size()));
    }
    const auto as_index = [&](double value, const char* what) {
      if (value < 0 || value != std::floor(value)) {
        throw RolloutError("line " + std::to_string(line_no) + ": bad " +
                           what);
      }
      return static_cast<std::int64_t>(value);
    };
    const std::int64_t trial = as_index(values[0], "trial");
    const std::int64_t tick = as_index(values[1], "tick");
    const std::int64_t agent = as_index(values[2], "agent");
    const std::int64_t k = as_index(values[3], "step k");
    if (k > out.horizon) {
      throw RolloutError("line " + std::to_string(line_no) +
                         ": step k exceeds horizon");
    }
    auto& seq = out.plans[{trial, tick, agent}];
    if (seq.states.size() == 0) {
      seq.states = Eigen::MatrixXd::Constant(
          out.state_dim, out.horizon + 1,
          std::numeric_limits<double>::quiet_NaN());
      seq.controls = Eigen::MatrixXd::Constant(
          out.input_dim, out.horizon + 1,
          std::numeric_limits<double>::quiet_NaN());
    }
    for (int i = 0; i < out.state_dim; ++i) seq.states(i, k) = values[4 + i];
    for (int i = 0; i < out.input_dim; ++i) {
      seq.controls(i, k) = values[4 + out.state_dim + i];
    }
  }
  if (!saw_header) throw RolloutError("missing rollout header line");

  for (const auto& [key, seq] : out.plans) {
    if (!seq.states.allFinite()) {
      throw RolloutError(
          "incomplete record for trial " + std::to_string(std::get<0>(key)) +
          " tick " + std::to_string(std::get<1>(key)) + " agent " +
          std::to_string(std::get<2>(key)) + ": missing steps");
    }
  }
  return out;
}

void validate_external_rollout(const ExternalRollout& rollout,
                               const LinearSystem& sys) {
  if (rollout.state_dim != sys.state_dim() ||
      rollout.input_dim != sys.input_dim()) {
    throw RolloutError("rollout dimensions do not match the system");
  }
  for (const auto& [key, seq] : rollout.plans) {
    for (int k = 0; k < rollout.horizon; ++k) {
      const Eigen::VectorXd predicted =
          sys.A * seq.states.col(k) + sys.B * seq.controls.col(k);
      const double err =
          (seq.states.col(k + 1) - predicted).lpNorm<Eigen::Infinity>();
      if (err > 1e-6) {
        throw RolloutError(
            "dynamics inconsistency at trial " +
            std::to_string(std::get<0>(key)) + " tick " +
            std::to_string(std::get<1>(key)) + " agent " +
            std::to_string(std::get<2>(key)) + " step " + std::to_string(k) +
            " (residual " + std::to_string(err) + ")");
      }
    }
  }
}

std::string serialize_external_rollout(const ExternalRollout& rollout) {
  std::ostringstream out;
  out.precision(17);
  out << kRolloutFormatVersion << " n=" << rollout.state_dim
      << " m=" << rollout.input_dim << " T=" << rollout.horizon << "\n";
  for (const auto& [key, seq] : rollout.plans) {
    for (int k = 0; k <= rollout.horizon; ++k) {
      out << std::get<0>(key) << " " << std::get<1>(key) << " "
          << std::get<2>(key) << " " << k;
      for (int i = 0; i < rollout.state_dim; ++i) out << " " << seq.states(i, k);
      for (int i = 0; i < rollout.input_dim; ++i) {
        const double u = std::isnan(seq.controls(i, k)) ? 0.0 : seq.controls(i, k);
        out << " " << u;
      }
      out << "\n";
    }
  }
  return out.str();
}

ReferencePolicy ReferencePolicy::baseline_proportional() {
  ReferencePolicy p;
  p.kind_ = PolicyKind::kBaselineProportional;
  return p;
}

ReferencePolicy ReferencePolicy::potential_field(
    const PotentialFieldParams& params, std::vector<double> covering_radii) {
  ReferencePolicy p;
  p.kind_ = PolicyKind::kPotentialField;
  p.params_ = params;
  p.covering_radii_ = std::move(covering_radii);
  return p;
}

ReferencePolicy ReferencePolicy::external(ExternalRollout rollout) {
  ReferencePolicy p;
  p.kind_ = PolicyKind::kExternalRollout;
  p.external_ = std::move(rollout);
  return p;
}

Eigen::VectorXd ReferencePolicy::action(const Eigen::VectorXd& observation,
                                        int state_dim, int output_dim) const {
  switch (kind_) {
    case PolicyKind::kBaselineProportional:
      return Eigen::VectorXd::Zero(output_dim);
    case PolicyKind::kPotentialField:
      return potential_field_action(observation, params_, state_dim,
                                    output_dim, covering_radii_);
    case PolicyKind::kExternalRollout:
      throw RolloutError("external policies replay stored plans");
  }
  return Eigen::VectorXd::Zero(output_dim);
}

ReferencePolicy make_policy(const Scenario& scenario) {
  switch (scenario.policy.kind) {
    case PolicyKind::kBaselineProportional:
      return ReferencePolicy::baseline_proportional();
    case PolicyKind::kPotentialField: {
      std::vector<double> gammas;
      gammas.reserve(scenario.obstacles.size());
      for (const auto& o : scenario.obstacles) {
        gammas.push_back(o.covering_radius(scenario.agent_body));
      }
      return ReferencePolicy::potential_field(
          scenario.policy.potential_field, std::move(gammas));
    }
    case PolicyKind::kExternalRollout:
      return load_external_rollout(scenario.policy.external_rollout_path,
                                   scenario.system);
  }
  throw RolloutError("make_policy: unknown policy kind");
}

ReferencePolicy load_external_rollout(const std::string& path,
                                      const LinearSystem& sys) {
  std::ifstream in(path);
  if (!in) throw RolloutError("cannot open rollout file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ExternalRollout rollout = parse_external_rollout(buffer.str());
  validate_external_rollout(rollout, sys);
  return ReferencePolicy::external(std::move(rollout));
}

Eigen::VectorXd assemble_observation(const LinearSystem& sys,
                                     const Eigen::VectorXd& state,
                                     const Eigen::VectorXd& target,
                                     const std::vector<Obstacle>& obstacles) {
  const int n = sys.state_dim();
  const int d = sys.output_dim();
  Eigen::VectorXd obs(n + d + static_cast<int>(obstacles.size()) * d);
  obs.head(n) = state;
  const Eigen::VectorXd p = sys.C * state;
  obs.segment(n, d) = p - target;
  for (std::size_t j = 0; j < obstacles.size(); ++j) {
    obs.segment(n + d + static_cast<int>(j) * d, d) =
        p - obstacles[j].mean_center;
  }
  return obs;
}

Eigen::VectorXd potential_field_action(
    const Eigen::VectorXd& observation, const PotentialFieldParams& params,
    int state_dim, int output_dim, const std::vector<double>& covering_radii) {
  const int d = output_dim;
  const int n_obstacles =
      static_cast<int>((observation.size() - state_dim - d) / d);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < n_obstacles; ++j) {
    const Eigen::VectorXd disp = observation.segment(state_dim + d + j * d, d);
    const double dist = disp.norm();
    if (dist > params.influence_radius || dist == 0.0) continue;
    const double gamma =
        j < static_cast<int>(covering_radii.size()) ? covering_radii[j] : 0.0;
    const double denom =
        std::max(dist * dist - gamma * gamma, params.epsilon);
    a += (params.repulsion_gain / denom) * (disp / dist);
  }
  return a.cwiseMax(-params.action_max).cwiseMin(params.action_max);
}

Plan rollout(const ReferencePolicy& policy,
             const std::vector<Eigen::VectorXd>& measurements,
             const Scenario& scenario, std::int64_t trial, std::int64_t tick) {
  const LinearSystem& sys = scenario.system;
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  const int T = scenario.horizon();
  if (static_cast<int>(measurements.size()) != scenario.n_agents) {
    throw RolloutError("rollout: one measurement per agent required");
  }

  Plan plan;
  plan.states.reserve(scenario.n_agents);
  plan.controls.reserve(scenario.n_agents);

  for (int i = 0; i < scenario.n_agents; ++i) {
    if (measurements[i].size() != n) {
      throw RolloutError("rollout: measurement dimension mismatch for agent " +
                         std::to_string(i));
    }
    if (policy.kind() == PolicyKind::kExternalRollout) {
      const auto& data = policy.rollout_data();
      const auto it = data.plans.find({trial, tick, static_cast<std::int64_t>(i)});
      if (it == data.plans.end()) {
        throw RolloutError("rollout: no external record for trial " +
                           std::to_string(trial) + " tick " +
                           std::to_string(tick) + " agent " +
                           std::to_string(i));
      }
      if (data.horizon != T) {
        throw RolloutError("rollout: external horizon mismatch");
      }
      plan.states.push_back(it->second.states);
      plan.controls.push_back(it->second.controls.leftCols(T));
      continue;
    }

    Eigen::MatrixXd states(n, T + 1);
    Eigen::MatrixXd controls(m, T);
    states.col(0) = measurements[i];
    for (int k = 0; k < T; ++k) {
      const Eigen::VectorXd obs = assemble_observation(
          sys, states.col(k), scenario.targets[i], scenario.obstacles);
      const Eigen::VectorXd action = policy.action(obs, n, sys.output_dim());
      const Eigen::VectorXd r = scenario.targets[i] + action;
      controls.col(k) =
          scenario.controller.K * states.col(k) + scenario.controller.F * r;
      states.col(k + 1) = sys.A * states.col(k) + sys.B * controls.col(k);
    }
    plan.states.push_back(std::move(states));
    plan.controls.push_back(std::move(controls));
  }
  return plan;
}

}  // namespace pssf
