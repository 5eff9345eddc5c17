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

#ifndef PSSF_SIMULATOR_HPP_
#define PSSF_SIMULATOR_HPP_

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pssf/planner.hpp"
#include "pssf/qp.hpp"
#include "pssf/rng.hpp"

namespace pssf {

enum class FilterMode { kSafetyFilter, kPureMpc, kUnfiltered };

std::string to_string(FilterMode mode);
/// Accepts "filter", "pure-mpc", "unfiltered".
FilterMode filter_mode_from_string(const std::string& name);

enum class TrialOutcome {
  kSuccess,
  kCollisionStatic,
  kCollisionAgent,
  kKeepOutExit,
  kLoiter,
  kSolverDegraded,
};

std::string to_string(TrialOutcome outcome);

struct TrajectoryRow {
  int tick = 0;
  int agent = 0;
  double px = 0, py = 0, vx = 0, vy = 0;
  double ux = 0, uy = 0;
  bool degraded = false;
};

/// Per-tick-per-(pair|obstacle|agent) safety-event counts for the empirical
/// chance-constraint validation.
struct SafetyTallies {
  long long obstacle_samples = 0, obstacle_events = 0;
  long long agent_samples = 0, agent_events = 0;
  long long keepin_samples = 0, keepin_events = 0;

  void add(const SafetyTallies& other);
};

struct TrialResult {
  TrialOutcome outcome = TrialOutcome::kLoiter;
  int completion_ticks = 0;
  double min_obstacle_clearance = 0.0;  // surface-to-surface, true centers
  double min_agent_clearance = 0.0;     // ||p_i-p_j|| - 2 r_A
  std::vector<double> setup_seconds;    // per tick
  std::vector<double> solve_seconds;    // per tick
  int degraded_ticks = 0;
  int control_clips = 0;
  SafetyTallies tallies;
  double max_kkt_stationarity = 0.0;
  double max_kkt_primal = 0.0;
  double max_kkt_complementarity = 0.0;
  std::vector<TrajectoryRow> trajectory;  // filled when requested
};

struct DebugHooks {
  std::function<void(int tick, const QpProblem&)> on_qp;
  std::function<void(int tick, const LinearConstraintSet&)> on_constraints;
};

struct TrialOptions {
  FilterMode mode = FilterMode::kSafetyFilter;
  bool terminal_constraints = true;
  std::uint64_t seed = 0;
  std::uint64_t trial_index = 0;
  bool record_trajectory = false;
  int loiter_cap = 800;
  double target_tolerance = 0.1;
  /// Run exactly loiter_cap ticks with no termination (timing studies).
  bool fixed_ticks = false;
  DebugHooks debug;
};

/// One stochastic world step: x+ = Ax + Bu + w, y = x+ + eta.
struct WorldStep {
  Eigen::VectorXd next_state;
  Eigen::VectorXd measurement;
};
WorldStep step_world(const LinearSystem& sys, const Eigen::VectorXd& state,
                     const Eigen::VectorXd& control, RngStream& process,
                     RngStream& measurement);

/// Closed-loop execution of one seeded trial. `terminal` may be null when
/// terminal constraints are off.
TrialResult run_trial(const Scenario& scenario, const ReferencePolicy& policy,
                      const TerminalSets* terminal, const TrialOptions& options);

struct ModeKey {
  FilterMode mode = FilterMode::kSafetyFilter;
  bool terminal = true;

  std::string label() const;
};

struct ModeSummary {
  std::string label;
  int n_trials = 0;
  int n_success = 0;
  std::array<int, 6> outcome_counts{};  // indexed by TrialOutcome
  double success_percent = 0.0;
  // (5,50,95) percentiles over the successful subset.
  std::array<double, 3> completion_ticks{};
  std::array<double, 3> min_obstacle_separation{};
  std::array<double, 3> min_agent_separation{};
  // (5,50,95) percentiles pooled over every tick of every trial.
  std::array<double, 3> setup_seconds{};
  std::array<double, 3> solve_seconds{};
  std::array<double, 3> tick_seconds{};
  SafetyTallies tallies;
  long long degraded_ticks = 0;
  double max_kkt_stationarity = 0.0;
  double max_kkt_primal = 0.0;
  double max_kkt_complementarity = 0.0;
};

struct CampaignSummary {
  std::vector<ModeSummary> modes;
  int n_trials = 0;
  std::uint64_t seed = 0;
};

/// Seeded Monte-Carlo campaign; trials run in parallel over `jobs` workers
/// with per-trial RNG streams, so results are independent of the worker
/// count. When `results` is non-null it receives per-mode, per-trial data
/// (indexed [mode][trial]).
CampaignSummary run_campaign(
    const Scenario& scenario, const ReferencePolicy& policy,
    const TerminalSets* terminal, const std::vector<ModeKey>& modes,
    int n_trials, std::uint64_t seed, int jobs, bool record_trajectories,
    std::vector<std::vector<TrialResult>>* results = nullptr);

/// Per-tick clearances recomputed from a dumped trajectory against the
/// nominal obstacle centers.
struct ClearanceSeries {
  // [tick][pair], pairs in (i>j) order matching pair_labels.
  std::vector<std::vector<double>> agent_pairs;
  std::vector<std::string> pair_labels;
  // [tick][agent * n_obstacles + obstacle]
  std::vector<std::vector<double>> obstacle;
  double min_agent_clearance = 0.0;
  double min_obstacle_clearance = 0.0;
};
ClearanceSeries clearance_metrics(const std::vector<TrajectoryRow>& trajectory,
                                  const Scenario& scenario);

/// Linear-interpolation percentile of an unsorted sample (p in [0,100]).
double percentile(std::vector<double> values, double p);

}  // namespace pssf

#endif  // PSSF_SIMULATOR_HPP_
