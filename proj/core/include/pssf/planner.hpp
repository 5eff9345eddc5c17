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

#ifndef PSSF_PLANNER_HPP_
#define PSSF_PLANNER_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "pssf/scenario.hpp"

namespace pssf {

struct RolloutError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kRolloutFormatVersion = "rollout-v1";

/// Replayable reference trajectories keyed by (trial, tick, agent).
struct ExternalRollout {
  int state_dim = 0;
  int input_dim = 0;
  int horizon = 0;
  struct Sequence {
    Eigen::MatrixXd states;    // n x (T+1)
    Eigen::MatrixXd controls;  // m x (T+1); column T is ignored padding
  };
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, Sequence>
      plans;
};

/// Parses the line-oriented rollout format:
///   rollout-v1 n=<n> m=<m> T=<T>
///   trial tick agent k x[0..n) u[0..m)
/// Exact field counts are enforced; `#` starts a comment.
ExternalRollout parse_external_rollout(const std::string& content);

/// Checks every stored sequence against the nominal dynamics within 1e-6.
/// Throws RolloutError naming the offending (trial, tick, agent, step).
void validate_external_rollout(const ExternalRollout& rollout,
                               const LinearSystem& sys);

std::string serialize_external_rollout(const ExternalRollout& rollout);

/// Immutable reference planner occupying the learned-policy slot.
class ReferencePolicy {
 public:
  static ReferencePolicy baseline_proportional();
  static ReferencePolicy potential_field(const PotentialFieldParams& params,
                                         std::vector<double> covering_radii);
  static ReferencePolicy external(ExternalRollout rollout);

  PolicyKind kind() const { return kind_; }
  const ExternalRollout& rollout_data() const { return external_; }

  /// Action in the compact action box given an observation vector laid out
  /// as [measurement(n); p - q (d); p - c_j (d) for each obstacle].
  Eigen::VectorXd action(const Eigen::VectorXd& observation, int state_dim,
                         int output_dim) const;

 private:
  ReferencePolicy() = default;
  PolicyKind kind_ = PolicyKind::kBaselineProportional;
  PotentialFieldParams params_;
  std::vector<double> covering_radii_;
  ExternalRollout external_;
};

/// Builds the scenario's configured built-in policy (covering radii are
/// derived from the obstacle and agent bodies). External-rollout scenarios
/// must go through load_external_rollout instead.
ReferencePolicy make_policy(const Scenario& scenario);

/// Reads, parses, and dynamics-validates a rollout file.
ReferencePolicy load_external_rollout(const std::string& path,
                                      const LinearSystem& sys);

/// [state; p - q; p - c_j ...] with p = C state.
Eigen::VectorXd assemble_observation(const LinearSystem& sys,
                                     const Eigen::VectorXd& state,
                                     const Eigen::VectorXd& target,
                                     const std::vector<Obstacle>& obstacles);

/// Repulsive action: sum_j k_rep / max(||p-c_j||^2 - gamma_j^2, eps) along
/// unit(p - c_j), restricted to obstacles inside the influence radius and
/// clipped to the action box.
Eigen::VectorXd potential_field_action(const Eigen::VectorXd& observation,
                                       const PotentialFieldParams& params,
                                       int state_dim, int output_dim,
                                       const std::vector<double>& covering_radii);

/// Closed-loop nominal rollout (per-agent, neighbors excluded from the
/// observation): r = q + action, u = K x + F r, x+ = A x + B u.
Plan rollout(const ReferencePolicy& policy,
             const std::vector<Eigen::VectorXd>& measurements,
             const Scenario& scenario, std::int64_t trial = 0,
             std::int64_t tick = 0);

}  // namespace pssf

#endif  // PSSF_PLANNER_HPP_
