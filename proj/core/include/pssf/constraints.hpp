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

#ifndef PSSF_CONSTRAINTS_HPP_
#define PSSF_CONSTRAINTS_HPP_

#include <string>
#include <vector>

#include "pssf/chance.hpp"
#include "pssf/reachability.hpp"
#include "pssf/scenario.hpp"

namespace pssf {

/// Stacked decision vector layout: all of agent 0's controls (step-major),
/// then agent 1's, ...
struct VariableMap {
  int n_agents = 0;
  int horizon = 0;
  int input_dim = 0;

  int column(int agent, int step, int input) const {
    return (agent * horizon + step) * input_dim + input;
  }
  int agent_offset(int agent) const { return agent * horizon * input_dim; }
  int size() const { return n_agents * horizon * input_dim; }
};

/// Mean/covariance prediction tables for one planning window; the
/// covariance recursion is control-independent, so everything here is
/// computed once per scenario.
struct PredictionModel {
  std::vector<Eigen::MatrixXd> a_pow;     // A^k, k = 0..T
  // pos_maps[k][s] = C A^{k-1-s} B: effect of u(s) on the position mean at k.
  std::vector<std::vector<Eigen::MatrixXd>> pos_maps;
  // state_maps[s] = A^{T-1-s} B: effect of u(s) on the terminal state mean.
  std::vector<Eigen::MatrixXd> state_maps;
  std::vector<Eigen::MatrixXd> cov_state;  // Sigma_x(t+k|t), k = 0..T
  std::vector<Eigen::MatrixXd> cov_pos;    // Sigma_p(t+k|t)

  int horizon() const { return static_cast<int>(a_pow.size()) - 1; }

  static PredictionModel build(const LinearSystem& sys, int horizon);

  /// Position mean at step k given the measurement and that agent's controls.
  Eigen::VectorXd position_mean(const LinearSystem& sys,
                                const Eigen::VectorXd& measurement,
                                const Eigen::MatrixXd& controls, int k) const;
};

struct RowInfo {
  int agent = 0;
  int step = 0;
  ConstraintKind kind = ConstraintKind::kObstacle;
  int counterpart = -1;  // obstacle index, paired agent, or halfspace index
};

/// Affine rows over the stacked decision vector, read as
/// coeffs.row(r) . u <= upper(r).
struct LinearConstraintSet {
  Eigen::MatrixXd coeffs;
  Eigen::VectorXd upper;
  std::vector<RowInfo> info;
  VariableMap map;

  int rows() const { return static_cast<int>(coeffs.rows()); }
};

/// Convexification directions at one step, from the reference rollout.
/// Coincident positions fall back to a deterministic pair-unique unit
/// vector in position coordinates.
struct DirectionBundle {
  // [agent][obstacle]
  std::vector<std::vector<Eigen::VectorXd>> obstacle_position;  // z, R^d
  std::vector<std::vector<Eigen::VectorXd>> obstacle_state;     // l, R^n
  // [agent i][agent j], only j < i populated
  std::vector<std::vector<Eigen::VectorXd>> agent_position;
  std::vector<std::vector<Eigen::VectorXd>> agent_state;
};

DirectionBundle convexification_directions(const Plan& plan,
                                           const Scenario& scenario, int step);

/// All risk-tightened rows for steps t..t+T: per-obstacle and per-pair
/// separating halfspaces plus keep-in walls, expanded over the stacked
/// controls through the prediction model.
LinearConstraintSet build_prop1_constraints(const Plan& plan,
                                            const PredictionModel& model,
                                            const Scenario& scenario);

/// Terminal rows at t+T: avoid-ellipsoid supporting halfspaces per obstacle
/// and agent pair, and tightened viability halfspaces.
LinearConstraintSet build_prop2_constraints(const Plan& plan,
                                            const TerminalSets& terminal,
                                            const PredictionModel& model,
                                            const Scenario& scenario);

LinearConstraintSet concatenate(const LinearConstraintSet& a,
                                const LinearConstraintSet& b);

/// One row per line: kind, agent, step, counterpart, coefficients, offset.
std::string dump_constraints(const LinearConstraintSet& set);

}  // namespace pssf

#endif  // PSSF_CONSTRAINTS_HPP_
