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

#ifndef PSSF_SCENARIO_HPP_
#define PSSF_SCENARIO_HPP_

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "pssf/chance.hpp"
#include "pssf/dynamics.hpp"
#include "pssf/geometry.hpp"

namespace pssf {

struct Obstacle {
  ConvexSet shape;             // body centered at the origin
  Eigen::VectorXd mean_center;  // nominal position in R^d
  Eigen::MatrixXd center_cov;   // d x d PSD

  /// Radius of the smallest ball covering shape (+) (-agent_body).
  double covering_radius(const ConvexSet& agent_body) const;
};

enum class PolicyKind { kBaselineProportional, kPotentialField, kExternalRollout };

struct PotentialFieldParams {
  double repulsion_gain = 0.05;
  double influence_radius = 0.75;
  double action_max = 1.0;  // compact action box, infinity norm
  double epsilon = 1e-3;    // denominator floor
};

struct PolicyConfig {
  PolicyKind kind = PolicyKind::kPotentialField;
  PotentialFieldParams potential_field;
  std::string external_rollout_path;
};

/// A full problem instance: dynamics, agents, obstacles, workspace, risk.
struct Scenario {
  LinearSystem system;
  StabilizedController controller;
  int n_agents = 0;
  ConvexSet agent_body = Ball(Eigen::Vector2d::Zero(), 0.1);
  std::vector<Obstacle> obstacles;
  ConvexPolytope workspace = ConvexPolytope::centered_box(2, 1.5);
  ConvexPolytope control_set = ConvexPolytope::centered_box(2, 2.0);
  std::vector<Eigen::VectorXd> starts;   // initial states, R^n
  std::vector<Eigen::VectorXd> targets;  // R^d
  RiskBudget risk;
  double deviation_weight = 1.0;   // lambda, uniform over agents and steps
  double mpc_input_penalty = 1e-2;  // epsilon in the regulation cost
  double velocity_bound = 1.0;      // terminal-set velocity box half-width
  PolicyConfig policy;

  int horizon() const { return risk.horizon; }

  /// Enforces the instance invariants; throws std::invalid_argument with a
  /// field-naming message on the first violation.
  void validate() const;
};

/// FNV-1a over a canonical binary encoding of every numeric field; used to
/// key the terminal-set cache.
std::uint64_t scenario_hash(const Scenario& scenario);

/// Reference rollout for all agents: states[i] is n x (T+1), controls[i]
/// is m x T, consistent with the nominal dynamics.
struct Plan {
  std::vector<Eigen::MatrixXd> states;
  std::vector<Eigen::MatrixXd> controls;

  int n_agents() const { return static_cast<int>(states.size()); }
  int horizon() const {
    return states.empty() ? 0 : static_cast<int>(states.front().cols()) - 1;
  }

  /// Max |x(k+1) - (A x(k) + B u(k))| over all agents and steps.
  double dynamics_residual(const LinearSystem& sys) const;
};

}  // namespace pssf

#endif  // PSSF_SCENARIO_HPP_
