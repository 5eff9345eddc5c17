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

#ifndef PSSF_QP_HPP_
#define PSSF_QP_HPP_

#include <optional>
#include <string>

#include "pssf/constraints.hpp"

namespace pssf {

/// min 1/2 x'Hx + f'x  s.t.  Gx <= h, lb <= x <= ub.
struct QpProblem {
  Eigen::MatrixXd hessian;
  Eigen::VectorXd linear;
  Eigen::MatrixXd constraints;  // retained inequality rows
  Eigen::VectorXd upper;
  std::vector<RowInfo> row_info;
  Eigen::VectorXd lower_bound;
  Eigen::VectorXd upper_bound;
  VariableMap map;

  // Rows with no control influence are checked at assembly; a violated one
  // makes the tick infeasible before the solver runs.
  bool infeasible_at_assembly = false;
  std::string infeasibility_note;
  int screened_rows = 0;  // rows provably slack over the control box

  int num_vars() const { return static_cast<int>(linear.size()); }
  int num_rows() const { return static_cast<int>(upper.size()); }
};

enum class QpStatus { kOptimal, kInfeasible, kMaxIterations };

struct QpSolution {
  QpStatus status = QpStatus::kMaxIterations;
  Eigen::VectorXd primal;
  Eigen::VectorXd dual;  // one multiplier per retained constraint row, >= 0
  double stationarity_residual = 0.0;
  double primal_residual = 0.0;
  double complementarity_residual = 0.0;
  double solve_seconds = 0.0;
  int iterations = 0;
};

struct QpSettings {
  double eps_abs = 1e-6;
  double eps_rel = 1e-5;
  int max_iterations = 20000;
  double rho = 0.1;
  double sigma = 1e-6;
  double over_relaxation = 1.6;
  bool adaptive_rho = true;
};

struct WarmStart {
  Eigen::VectorXd primal;
  Eigen::VectorXd dual;  // may be empty
};

/// Minimal-deviation cost (H = 2 lambda I, f = -2 lambda u_ref) plus every
/// Prop-1/Prop-2 row and the control box.
QpProblem assemble(const Plan& plan, const LinearConstraintSet& p1,
                   const LinearConstraintSet& p2, const Scenario& scenario);

/// Set-point regulation cost over the horizon with an input penalty,
/// same constraint rows.
QpProblem assemble_pure_mpc(const Plan& plan, const LinearConstraintSet& p1,
                            const LinearConstraintSet& p2,
                            const PredictionModel& model,
                            const Scenario& scenario);

/// Operator-splitting solve with over-relaxation, residual-ratio rho
/// adaptation, an infeasibility certificate, and an active-set polish on
/// convergence. Deterministic for identical inputs.
QpSolution solve(const QpProblem& problem, const QpSettings& settings = {},
                 const std::optional<WarmStart>& warm_start = std::nullopt);

/// u_i(t|t) per agent.
std::vector<Eigen::VectorXd> extract_first_controls(const QpSolution& solution,
                                                    const VariableMap& map);

/// The T-1 remaining planned controls of one agent (columns 1..T-1).
Eigen::MatrixXd remaining_controls(const QpSolution& solution,
                                   const VariableMap& map, int agent);

/// Matrix-market-style text dump for external cross-checks.
std::string dump_qp(const QpProblem& problem);

}  // namespace pssf

#endif  // PSSF_QP_HPP_
