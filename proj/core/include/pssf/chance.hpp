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

#ifndef PSSF_CHANCE_HPP_
#define PSSF_CHANCE_HPP_

#include <Eigen/Core>
#include <stdexcept>

namespace pssf {

/// Standard normal CDF.
double standard_normal_cdf(double x);

/// Phi^{-1}(p) for p in (0,1); rational approximation refined by one Halley
/// step, absolute error <= 1e-9 on [1e-10, 1-1e-10]. Throws std::domain_error
/// outside (0,1).
double inverse_normal_cdf(double p);

/// sqrt((1-alpha)/alpha): distribution-free replacement for -Phi^{-1}(alpha).
double chebyshev_quantile(double alpha);

/// Uniform risk allocation across a horizon: risk/T.
double allocate_risk(double trajectory_risk, int horizon);

/// Symmetric PSD square root; eigenvalues below zero are clamped.
Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m);

enum class ConstraintKind {
  kObstacle,
  kAgent,
  kKeepIn,
  kTerminalObstacle,
  kTerminalAgent,
  kTerminalViability,
  kControlSet,
};

/// A deterministic halfspace constraint on a Gaussian mean. Avoidance rows
/// (obstacle/agent/terminal-obstacle/terminal-agent) read
/// normal . mean >= offset; keep-in and viability rows read
/// normal . mean <= offset.
struct TightenedHalfspace {
  Eigen::VectorXd normal;
  double offset = 0.0;
  ConstraintKind kind = ConstraintKind::kObstacle;
};

/// P(a.y <= b) <= alpha  <=>  a.mean >= b - ||Sigma^{1/2} a|| Phi^{-1}(alpha).
TightenedHalfspace tighten_upper(const Eigen::VectorXd& a, double b,
                                 const Eigen::MatrixXd& cov, double alpha,
                                 ConstraintKind kind = ConstraintKind::kObstacle);

/// P(a.y >= b) <= alpha  <=>  a.mean <= b - ||Sigma^{1/2} a|| Phi^{-1}(1-alpha).
TightenedHalfspace tighten_lower(const Eigen::VectorXd& a, double b,
                                 const Eigen::MatrixXd& cov, double alpha,
                                 ConstraintKind kind = ConstraintKind::kKeepIn);

/// Per-trajectory risk budgets with uniform per-step allocation.
struct RiskBudget {
  double alpha_obstacle = 0.01;  // per agent-obstacle pair per trajectory
  double beta_agent = 0.01;      // per agent pair per trajectory
  double kappa_keepin = 0.01;    // per agent per trajectory
  double delta_terminal = 0.1;
  int horizon = 10;

  double per_step_obstacle() const { return alpha_obstacle / horizon; }
  double per_step_agent() const { return beta_agent / horizon; }
  double per_step_keepin() const { return kappa_keepin / horizon; }

  /// Throws std::invalid_argument when any risk leaves (0,1) or horizon < 1.
  void validate() const;
};

}  // namespace pssf

#endif  // PSSF_CHANCE_HPP_
