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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include <cstring>

#include "pssf/simulator.hpp"

using namespace pssf;

namespace {

Scenario single_agent_scenario() {
  Scenario scn = pssf_test::make_small_scenario();
  scn.n_agents = 1;
  scn.starts.resize(1);
  scn.targets.resize(1);
  scn.starts[0] << -0.9, 0.6, 0, 0;
  scn.targets[0] = Eigen::Vector2d(0.9, 0.6);  // clear of the obstacle
  scn.validate();
  return scn;
}

Scenario head_on_scenario() {
  Scenario scn = pssf_test::make_small_scenario();
  scn.obstacles.clear();
  scn.starts[0] << -0.8, 0.0, 0, 0;
  scn.starts[1] << 0.8, 0.001, 0, 0;  // near-exact head-on swap
  scn.targets[0] = Eigen::Vector2d(0.8, 0.0);
  scn.targets[1] = Eigen::Vector2d(-0.8, 0.001);
  scn.validate();
  return scn;
}

}  // namespace

TEST_CASE("step_world") {
  LinearSystem sys = double_integrator_2d(0.1);
  SUBCASE("no noise reproduces the nominal dynamics bitwise") {
    RngStream process(1, 0, 0, NoiseKind::kProcess);
    RngStream measurement(1, 0, 0, NoiseKind::kMeasurement);
    Eigen::VectorXd x(4), u(2);
    x << 0.3, -0.2, 0.5, 0.1;
    u << 0.7, -0.4;
    const WorldStep step = step_world(sys, x, u, process, measurement);
    const Eigen::VectorXd expected = sys.A * x + sys.B * u;
    CHECK((step.next_state - expected).cwiseAbs().maxCoeff() == 0.0);
    CHECK((step.measurement - expected).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("sample statistics of the process noise") {
    sys.sigma_w = Eigen::Vector4d(1e-4, 1e-4, 0, 0).asDiagonal();
    RngStream process(7, 0, 0, NoiseKind::kProcess);
    RngStream measurement(7, 0, 0, NoiseKind::kMeasurement);
    const int n = 100000;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
    Eigen::MatrixXd sum_sq = Eigen::MatrixXd::Zero(4, 4);
    const Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(2);
    for (int i = 0; i < n; ++i) {
      const WorldStep step = step_world(sys, x, u, process, measurement);
      sum += step.next_state;
      sum_sq += step.next_state * step.next_state.transpose();
    }
    const Eigen::VectorXd mean = sum / n;
    const Eigen::MatrixXd cov = sum_sq / n - mean * mean.transpose();
    // Mean within 4 sigma / sqrt(n) per axis; covariance within 5%.
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(mean(i)) <= 4.0 * 1e-2 / std::sqrt(double(n)));
      CHECK(cov(i, i) == doctest::Approx(1e-4).epsilon(0.05));
    }
    CHECK(cov(2, 2) == 0.0);
  }
  SUBCASE("identical streams give identical draws") {
    sys.sigma_w = Eigen::Vector4d(1e-4, 1e-4, 0, 0).asDiagonal();
    RngStream p1(42, 3, 1, NoiseKind::kProcess), m1(42, 3, 1, NoiseKind::kMeasurement);
    RngStream p2(42, 3, 1, NoiseKind::kProcess), m2(42, 3, 1, NoiseKind::kMeasurement);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    const Eigen::VectorXd u = Eigen::VectorXd::Zero(2);
    for (int i = 0; i < 100; ++i) {
      const WorldStep a = step_world(sys, x, u, p1, m1);
      const WorldStep b = step_world(sys, x, u, p2, m2);
      CHECK((a.next_state - b.next_state).cwiseAbs().maxCoeff() == 0.0);
      x = a.next_state;
    }
  }
}

TEST_CASE("slack filter leaves a lone agent's trajectory unchanged") {
  const Scenario scn = single_agent_scenario();
  const ReferencePolicy policy = make_policy(scn);
  const TerminalSets sets = build_terminal_sets(scn, 100);

  TrialOptions filter_options;
  filter_options.mode = FilterMode::kSafetyFilter;
  filter_options.seed = 5;
  filter_options.record_trajectory = true;
  const TrialResult filtered = run_trial(scn, policy, &sets, filter_options);

  TrialOptions raw_options = filter_options;
  raw_options.mode = FilterMode::kUnfiltered;
  raw_options.terminal_constraints = false;
  const TrialResult raw = run_trial(scn, policy, nullptr, raw_options);

  CHECK(filtered.outcome == TrialOutcome::kSuccess);
  CHECK(raw.outcome == TrialOutcome::kSuccess);
  REQUIRE(filtered.trajectory.size() == raw.trajectory.size());
  for (std::size_t i = 0; i < filtered.trajectory.size(); ++i) {
    CHECK(std::abs(filtered.trajectory[i].px - raw.trajectory[i].px) <= 1e-6);
    CHECK(std::abs(filtered.trajectory[i].py - raw.trajectory[i].py) <= 1e-6);
  }
  CHECK(filtered.degraded_ticks == 0);
}

TEST_CASE("head-on swap: unfiltered collides, the filter does not") {
  const Scenario scn = head_on_scenario();
  const ReferencePolicy policy = make_policy(scn);
  const TerminalSets sets = build_terminal_sets(scn, 100);

  TrialOptions options;
  options.seed = 11;
  options.mode = FilterMode::kUnfiltered;
  options.terminal_constraints = false;
  const TrialResult raw = run_trial(scn, policy, nullptr, options);
  CHECK(raw.min_agent_clearance < 0.0);
  CHECK(raw.outcome == TrialOutcome::kCollisionAgent);

  options.mode = FilterMode::kSafetyFilter;
  options.terminal_constraints = true;
  const TrialResult filtered = run_trial(scn, policy, &sets, options);
  CHECK(filtered.min_agent_clearance > 0.0);
}

TEST_CASE("trial results are reproducible bit for bit") {
  const Scenario scn = head_on_scenario();
  const ReferencePolicy policy = make_policy(scn);
  const TerminalSets sets = build_terminal_sets(scn, 100);
  TrialOptions options;
  options.seed = 123;
  options.trial_index = 4;
  options.record_trajectory = true;
  const TrialResult a = run_trial(scn, policy, &sets, options);
  const TrialResult b = run_trial(scn, policy, &sets, options);
  CHECK(a.outcome == b.outcome);
  CHECK(a.completion_ticks == b.completion_ticks);
  CHECK(std::memcmp(&a.min_agent_clearance, &b.min_agent_clearance,
                    sizeof(double)) == 0);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    CHECK(std::memcmp(&a.trajectory[i].px, &b.trajectory[i].px,
                      sizeof(double)) == 0);
    CHECK(std::memcmp(&a.trajectory[i].ux, &b.trajectory[i].ux,
                      sizeof(double)) == 0);
  }
}

TEST_CASE("campaign is independent of the worker count") {
  const Scenario scn = head_on_scenario();
  const ReferencePolicy policy = make_policy(scn);
  const TerminalSets sets = build_terminal_sets(scn, 100);
  const std::vector<ModeKey> modes{{FilterMode::kSafetyFilter, true}};
  std::vector<std::vector<TrialResult>> serial, parallel;
  const CampaignSummary a = run_campaign(scn, policy, &sets, modes, 4, 9, 1,
                                         true, &serial);
  const CampaignSummary b = run_campaign(scn, policy, &sets, modes, 4, 9, 3,
                                         true, &parallel);
  CHECK(a.modes[0].n_success == b.modes[0].n_success);
  for (int t = 0; t < 4; ++t) {
    REQUIRE(serial[0][t].trajectory.size() == parallel[0][t].trajectory.size());
    for (std::size_t i = 0; i < serial[0][t].trajectory.size(); ++i) {
      CHECK(serial[0][t].trajectory[i].px == parallel[0][t].trajectory[i].px);
    }
  }
}

TEST_CASE("campaign percentiles with degenerate inputs") {
  const Scenario scn = single_agent_scenario();
  const ReferencePolicy policy = make_policy(scn);
  const TerminalSets sets = build_terminal_sets(scn, 100);
  const std::vector<ModeKey> modes{{FilterMode::kSafetyFilter, true}};
  const CampaignSummary one =
      run_campaign(scn, policy, &sets, modes, 1, 3, 1, false, nullptr);
  // Single trial: all three percentiles coincide.
  CHECK(one.modes[0].completion_ticks[0] == one.modes[0].completion_ticks[1]);
  CHECK(one.modes[0].completion_ticks[1] == one.modes[0].completion_ticks[2]);
}

TEST_CASE("percentile matches a sort-based oracle") {
  std::mt19937 rng(55);
  std::uniform_real_distribution<double> unif(-10.0, 10.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> values(1 + trial * 7);
    for (auto& v : values) v = unif(rng);
    for (double p : {5.0, 50.0, 95.0}) {
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      const double rank = p / 100.0 * (sorted.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(rank);
      const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
      const double expected =
          sorted[lo] + (rank - lo) * (sorted[hi] - sorted[lo]);
      CHECK(percentile(values, p) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("clearance metrics") {
  Scenario scn = pssf_test::make_small_scenario();
  SUBCASE("two agents 0.5 m apart have clearance 0.3") {
    std::vector<TrajectoryRow> rows(2);
    rows[0].tick = 0;
    rows[0].agent = 0;
    rows[0].px = 0.0;
    rows[0].py = 0.0;
    rows[1].tick = 0;
    rows[1].agent = 1;
    rows[1].px = 0.5;
    rows[1].py = 0.0;
    const ClearanceSeries series = clearance_metrics(rows, scn);
    CHECK(series.agent_pairs[0][0] == doctest::Approx(0.3));
  }
  SUBCASE("touching bodies have zero clearance") {
    std::vector<TrajectoryRow> rows(2);
    rows[0].agent = 0;
    rows[1].agent = 1;
    rows[1].px = 0.2;
    const ClearanceSeries series = clearance_metrics(rows, scn);
    CHECK(series.agent_pairs[0][0] == doctest::Approx(0.0));
  }
  SUBCASE("replayed minimum equals a brute-force scan") {
    const Scenario head_on = head_on_scenario();
    const ReferencePolicy policy = make_policy(head_on);
    const TerminalSets sets = build_terminal_sets(head_on, 100);
    TrialOptions options;
    options.seed = 2;
    options.record_trajectory = true;
    const TrialResult result = run_trial(head_on, policy, &sets, options);
    const ClearanceSeries series =
        clearance_metrics(result.trajectory, head_on);
    double brute = 1e300;
    for (const auto& a : result.trajectory) {
      for (const auto& b : result.trajectory) {
        if (a.tick != b.tick || a.agent >= b.agent) continue;
        brute = std::min(brute, std::hypot(a.px - b.px, a.py - b.py) - 0.2);
      }
    }
    CHECK(series.min_agent_clearance == doctest::Approx(brute).epsilon(1e-12));
  }
}

TEST_CASE("mode and outcome names round trip") {
  CHECK(to_string(FilterMode::kPureMpc) == "pure-mpc");
  CHECK(filter_mode_from_string("pure-mpc") == FilterMode::kPureMpc);
  CHECK_THROWS_AS(filter_mode_from_string("bogus"), std::invalid_argument);
  CHECK(to_string(TrialOutcome::kSolverDegraded) == "solver-degraded-failure");
}
