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

#ifndef PSSF_REACHABILITY_HPP_
#define PSSF_REACHABILITY_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "pssf/geometry.hpp"
#include "pssf/scenario.hpp"

namespace pssf {

inline constexpr const char* kTerminalSetsFormatVersion =
    "pssf-terminal-sets-v1";

/// Terminal keep-out ellipsoids and the viability polytope of the scenario,
/// all in state space.
struct TerminalSets {
  std::vector<Ellipsoid> avoid_obstacle;  // one per obstacle, relative state
  Ellipsoid avoid_agent =
      Ellipsoid(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1));
  ConvexPolytope viability = ConvexPolytope::centered_box(1, 1.0);

  struct Meta {
    std::vector<int> avoid_obstacle_iterations;
    std::vector<bool> avoid_obstacle_cap_hit;
    int avoid_agent_iterations = 0;
    bool avoid_agent_cap_hit = false;
    int viability_iterations = 0;
    double velocity_bound = 0.0;
  } meta;
};

struct AvoidSetInfo {
  int iterations = 0;
  bool cap_hit = false;
};

/// Backward recursion CurrentSet <- A^{-1}(CurrentSet (-) B U) intersected
/// with the domain box, then the Loewner-John ellipsoid of the hull of all
/// iterates. Outer-approximates the inevitable-entry states within the
/// domain and the executed iterations.
Ellipsoid avoid_set_outer(const LinearSystem& sys, const ConvexPolytope& control_set,
                          const ConvexPolytope& seed, const ConvexPolytope& domain,
                          int max_iters, AvoidSetInfo* info = nullptr);

struct ViabilityInfo {
  int iterations = 0;
};

/// Fixed point of CurrentSet <- G intersect {x : exists u in U, Ax + Bu in
/// CurrentSet}, the one-step-backward set computed by exact projection.
/// Set equality is tested by mutual halfspace implication within 1e-8.
/// Throws NonConvergenceError when the cap is reached without a fixed point.
ConvexPolytope viability_set(const LinearSystem& sys,
                             const ConvexPolytope& control_set,
                             const ConvexPolytope& good_seed, int max_iters,
                             ViabilityInfo* info = nullptr);

/// {x : exists u in U, Ax + Bu in target}.
ConvexPolytope pre_set(const LinearSystem& sys,
                       const ConvexPolytope& control_set,
                       const ConvexPolytope& target);

/// Position polytope lifted to state space (velocity coefficients zero).
ConvexPolytope lift_position_polytope(const ConvexPolytope& p, int state_dim);

/// Outer polygonal approximation of shape (+) (-agent_body), centered at the
/// origin, as `sides` tangent halfspaces.
ConvexPolytope inflate_to_polygon(const ConvexSet& shape,
                                  const ConvexSet& agent_body, int sides);

/// All three terminal sets of the scenario: per-obstacle avoid ellipsoids,
/// the inter-agent avoid ellipsoid, and the viability polytope for the
/// eroded workspace with the scenario's velocity bounds.
TerminalSets build_terminal_sets(const Scenario& scenario, int max_iters = 200);

/// Versioned, hash-keyed cache form.
std::string serialize_terminal_sets(const TerminalSets& sets,
                                    std::uint64_t scenario_hash_value);
/// Throws std::runtime_error on version or hash mismatch.
TerminalSets parse_terminal_sets(const std::string& content,
                                 std::uint64_t expected_hash);

}  // namespace pssf

#endif  // PSSF_REACHABILITY_HPP_
