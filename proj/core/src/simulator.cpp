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

#include "pssf/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <thread>

#include "pssf/log.hpp"

namespace pssf {

std::string to_string(FilterMode mode) {
  switch (mode) {
    case FilterMode::kSafetyFilter:
      return "filter";
    case FilterMode::kPureMpc:
      return "pure-mpc";
    case FilterMode::kUnfiltered:
      return "unfiltered";
  }
  return "?";
}

FilterMode filter_mode_from_string(const std::string& name) {
  if (name == "filter") return FilterMode::kSafetyFilter;
  if (name == "pure-mpc") return FilterMode::kPureMpc;
  if (name == "unfiltered") return FilterMode::kUnfiltered;
  throw std::invalid_argument("unknown mode '" + name +
                              "' (expected filter, pure-mpc, unfiltered)");
}

std::string to_string(TrialOutcome outcome) {
  switch (outcome) {
    case TrialOutcome::kSuccess:
      return "success";
    case TrialOutcome::kCollisionStatic:
      return "collision-static";
    case TrialOutcome::kCollisionAgent:
      return "collision-agent";
    case TrialOutcome::kKeepOutExit:
      return "keepout-exit";
    case TrialOutcome::kLoiter:
      return "loiter";
    case TrialOutcome::kSolverDegraded:
      return "solver-degraded-failure";
  }
  return "?";
}

void SafetyTallies::add(const SafetyTallies& other) {
  obstacle_samples += other.obstacle_samples;
  obstacle_events += other.obstacle_events;
  agent_samples += other.agent_samples;
  agent_events += other.agent_events;
  keepin_samples += other.keepin_samples;
  keepin_events += other.keepin_events;
}

std::string ModeKey::label() const {
  return to_string(mode) + (terminal ? "+terminal" : "-terminal");
}

WorldStep step_world(const LinearSystem& sys, const Eigen::VectorXd& state,
                     const Eigen::VectorXd& control, RngStream& process,
                     RngStream& measurement) {
  const int n = sys.state_dim();
  const Eigen::MatrixXd sqrt_w = sqrt_psd(sys.sigma_w);
  const Eigen::MatrixXd sqrt_eta = sqrt_psd(sys.sigma_eta);
  WorldStep step;
  step.next_state =
      sys.A * state + sys.B * control + sqrt_w * process.gaussian_vector(n);
  step.measurement = step.next_state + sqrt_eta * measurement.gaussian_vector(n);
  return step;
}

namespace {

double agent_body_radius(const Scenario& scenario) {
  // Tight for balls; the max support over axes otherwise.
  if (const auto* ball = std::get_if<Ball>(&scenario.agent_body)) {
    return ball->radius;
  }
  double r = 0.0;
  const int d = scenario.system.output_dim();
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(d);
  for (int k = 0; k < d; ++k) {
    for (double sign : {1.0, -1.0}) {
      dir.setZero();
      dir(k) = sign;
      r = std::max(r, support(scenario.agent_body, dir));
    }
  }
  return r;
}

double obstacle_radius(const Obstacle& obstacle) {
  if (const auto* ball = std::get_if<Ball>(&obstacle.shape)) {
    return ball->radius;
  }
  double r = 0.0;
  const int d = obstacle.mean_center.size();
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(d);
  for (int k = 0; k < d; ++k) {
    for (double sign : {1.0, -1.0}) {
      dir.setZero();
      dir(k) = sign;
      r = std::max(r, support(obstacle.shape, dir));
    }
  }
  return r;
}

struct TrialContext {
  const Scenario& scenario;
  const ReferencePolicy& policy;
  const TerminalSets* terminal;
  const PredictionModel& model;
  const Eigen::MatrixXd& sqrt_w;
  const Eigen::MatrixXd& sqrt_eta;
  const ConvexPolytope& eroded_workspace;  // E (-) A
  double body_radius;
  std::vector<double> obstacle_radii;
  const ReferencePolicy* baseline;  // convexification source in pure-mpc
};

TrialResult run_trial_with_context(const TrialContext& ctx,
                                   const TrialOptions& options) {
  const Scenario& scenario = ctx.scenario;
  const LinearSystem& sys = scenario.system;
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  const int num_agents = scenario.n_agents;
  const int num_obstacles = static_cast<int>(scenario.obstacles.size());
  const int T = scenario.horizon();
  const double inf = std::numeric_limits<double>::infinity();

  // Per-(agent, kind) noise streams; obstacle centers drawn once per trial.
  std::vector<RngStream> process_streams, measurement_streams;
  process_streams.reserve(num_agents);
  measurement_streams.reserve(num_agents);
  for (int i = 0; i < num_agents; ++i) {
    process_streams.emplace_back(options.seed, options.trial_index, i,
                                 NoiseKind::kProcess);
    measurement_streams.emplace_back(options.seed, options.trial_index, i,
                                     NoiseKind::kMeasurement);
  }
  std::vector<Eigen::VectorXd> true_centers;
  {
    RngStream obstacle_stream(options.seed, options.trial_index, 0,
                              NoiseKind::kObstacle);
    for (const auto& o : scenario.obstacles) {
      true_centers.push_back(o.mean_center +
                             sqrt_psd(o.center_cov) *
                                 obstacle_stream.gaussian_vector(
                                     static_cast<int>(o.mean_center.size())));
    }
  }

  std::vector<Eigen::VectorXd> states = scenario.starts;
  std::vector<Eigen::VectorXd> measurements = states;  // x(0) known

  TrialResult result;
  result.min_obstacle_clearance = inf;
  result.min_agent_clearance = inf;

  // Fallback cache: remaining planned controls from the last optimal solve.
  std::vector<std::deque<Eigen::VectorXd>> fallback(num_agents);
  std::optional<WarmStart> warm;

  const Eigen::VectorXd box_lo = [&] {
    Eigen::VectorXd lo(m);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < m; ++j) {
      dir.setZero();
      dir(j) = -1.0;
      lo(j) = -support(scenario.control_set, dir);
    }
    return lo;
  }();
  const Eigen::VectorXd box_hi = [&] {
    Eigen::VectorXd hi(m);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(m);
    for (int j = 0; j < m; ++j) {
      dir.setZero();
      dir(j) = 1.0;
      hi(j) = support(scenario.control_set, dir);
    }
    return hi;
  }();

  const auto record_rows = [&](int tick,
                               const std::vector<Eigen::VectorXd>& controls,
                               bool degraded) {
    if (!options.record_trajectory) return;
    for (int i = 0; i < num_agents; ++i) {
      TrajectoryRow row;
      row.tick = tick;
      row.agent = i;
      row.px = states[i](0);
      row.py = states[i](1);
      row.vx = states[i](2);
      row.vy = states[i](3);
      row.ux = controls[i](0);
      row.uy = controls[i](1);
      row.degraded = degraded;
      result.trajectory.push_back(row);
    }
  };

  bool terminated = false;
  int tick = 0;
  for (tick = 0; tick < options.loiter_cap && !terminated; ++tick) {
    // Reference rollout (baseline trajectory in pure-MPC mode).
    const ReferencePolicy& planner =
        options.mode == FilterMode::kPureMpc ? *ctx.baseline : ctx.policy;
    const auto t_setup = std::chrono::steady_clock::now();
    const Plan plan =
        rollout(planner, measurements, scenario,
                static_cast<std::int64_t>(options.trial_index), tick);

    std::vector<Eigen::VectorXd> controls(num_agents);
    bool degraded = false;
    double setup_seconds = 0.0;
    double solve_seconds = 0.0;

    if (options.mode == FilterMode::kUnfiltered) {
      for (int i = 0; i < num_agents; ++i) {
        controls[i] = plan.controls[i].col(0);
      }
      setup_seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_setup)
                          .count();
    } else {
      const LinearConstraintSet p1 =
          build_prop1_constraints(plan, ctx.model, scenario);
      LinearConstraintSet p2;
      p2.map = p1.map;
      if (options.terminal_constraints) {
        p2 = build_prop2_constraints(plan, *ctx.terminal, ctx.model, scenario);
      }
      QpProblem qp =
          options.mode == FilterMode::kPureMpc
              ? assemble_pure_mpc(plan, p1, p2, ctx.model, scenario)
              : assemble(plan, p1, p2, scenario);
      setup_seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t_setup)
                          .count();
      if (options.debug.on_constraints) {
        options.debug.on_constraints(tick, concatenate(p1, p2));
      }
      if (options.debug.on_qp) options.debug.on_qp(tick, qp);

      const QpSolution solution = solve(qp, QpSettings{}, warm);
      solve_seconds = solution.solve_seconds;

      if (solution.status == QpStatus::kOptimal) {
        const auto firsts = extract_first_controls(solution, qp.map);
        for (int i = 0; i < num_agents; ++i) {
          controls[i] = firsts[i];
          fallback[i].clear();
          const Eigen::MatrixXd rest = remaining_controls(solution, qp.map, i);
          for (int s = 0; s < rest.cols(); ++s) {
            fallback[i].push_back(rest.col(s));
          }
        }
        result.max_kkt_stationarity = std::max(
            result.max_kkt_stationarity, solution.stationarity_residual);
        result.max_kkt_primal =
            std::max(result.max_kkt_primal, solution.primal_residual);
        result.max_kkt_complementarity = std::max(
            result.max_kkt_complementarity, solution.complementarity_residual);
        // Shifted warm start for the next tick.
        WarmStart next_warm;
        next_warm.primal = Eigen::VectorXd::Zero(qp.map.size());
        for (int a = 0; a < num_agents; ++a) {
          for (int s = 0; s < T; ++s) {
            const int src = std::min(s + 1, T - 1);
            next_warm.primal.segment(qp.map.column(a, s, 0), m) =
                solution.primal.segment(qp.map.column(a, src, 0), m);
          }
        }
        warm = next_warm;
      } else {
        degraded = true;
        ++result.degraded_ticks;
        for (int i = 0; i < num_agents; ++i) {
          if (!fallback[i].empty()) {
            controls[i] = fallback[i].front();
            fallback[i].pop_front();
          } else {
            controls[i] = scenario.controller.K * measurements[i];
          }
        }
        warm.reset();
        log_debug("tick " + std::to_string(tick) +
                  ": QP not optimal, fallback controls applied");
      }
    }

    // Clip to the control box; the QP already enforces it, so clips flag
    // degradation.
    for (int i = 0; i < num_agents; ++i) {
      const Eigen::VectorXd clipped =
          controls[i].cwiseMax(box_lo).cwiseMin(box_hi);
      if ((clipped - controls[i]).lpNorm<Eigen::Infinity>() > 1e-9) {
        ++result.control_clips;
        log_debug("tick " + std::to_string(tick) + ": control clipped");
      }
      controls[i] = clipped;
    }

    record_rows(tick, controls, degraded);
    result.setup_seconds.push_back(setup_seconds);
    result.solve_seconds.push_back(solve_seconds);

    // Advance the world.
    for (int i = 0; i < num_agents; ++i) {
      const Eigen::VectorXd w =
          ctx.sqrt_w * process_streams[i].gaussian_vector(n);
      states[i] = sys.A * states[i] + sys.B * controls[i] + w;
      measurements[i] =
          states[i] + ctx.sqrt_eta * measurement_streams[i].gaussian_vector(n);
    }

    // Safety bookkeeping on the true post-step state.
    bool hit_static = false, hit_agent = false, hit_keepout = false;
    for (int i = 0; i < num_agents; ++i) {
      const Eigen::VectorXd p = sys.C * states[i];
      for (int j = 0; j < num_obstacles; ++j) {
        const double clearance = (p - true_centers[j]).norm() -
                                 ctx.obstacle_radii[j] - ctx.body_radius;
        result.min_obstacle_clearance =
            std::min(result.min_obstacle_clearance, clearance);
        ++result.tallies.obstacle_samples;
        if (clearance < 0.0) {
          ++result.tallies.obstacle_events;
          hit_static = true;
        }
      }
      for (int j = 0; j < i; ++j) {
        const double clearance =
            (p - sys.C * states[j]).norm() - 2.0 * ctx.body_radius;
        result.min_agent_clearance =
            std::min(result.min_agent_clearance, clearance);
        ++result.tallies.agent_samples;
        if (clearance < 0.0) {
          ++result.tallies.agent_events;
          hit_agent = true;
        }
      }
      ++result.tallies.keepin_samples;
      if (!ctx.eroded_workspace.contains(p, 0.0)) {
        ++result.tallies.keepin_events;
        hit_keepout = true;
      }
    }

    if (!options.fixed_ticks) {
      if (hit_static) {
        result.outcome = TrialOutcome::kCollisionStatic;
        terminated = true;
      } else if (hit_agent) {
        result.outcome = TrialOutcome::kCollisionAgent;
        terminated = true;
      } else if (hit_keepout) {
        result.outcome = TrialOutcome::kKeepOutExit;
        terminated = true;
      } else {
        bool all_at_target = true;
        for (int i = 0; i < num_agents && all_at_target; ++i) {
          const Eigen::VectorXd p = sys.C * states[i];
          all_at_target =
              (p - scenario.targets[i]).norm() <= options.target_tolerance;
        }
        if (all_at_target) {
          result.outcome = TrialOutcome::kSuccess;
          terminated = true;
        }
      }
    }
  }
  result.completion_ticks = tick;
  if (!terminated) {
    result.outcome =
        options.fixed_ticks ? TrialOutcome::kSuccess : TrialOutcome::kLoiter;
  }
  if (result.outcome == TrialOutcome::kSuccess && result.degraded_ticks > 0) {
    result.outcome = TrialOutcome::kSolverDegraded;
  }
  return result;
}

}  // namespace

TrialResult run_trial(const Scenario& scenario, const ReferencePolicy& policy,
                      const TerminalSets* terminal,
                      const TrialOptions& options) {
  if (options.terminal_constraints && options.mode != FilterMode::kUnfiltered &&
      terminal == nullptr) {
    throw std::invalid_argument("run_trial: terminal sets required");
  }
  const PredictionModel model =
      PredictionModel::build(scenario.system, scenario.horizon());
  const Eigen::MatrixXd sqrt_w = sqrt_psd(scenario.system.sigma_w);
  const Eigen::MatrixXd sqrt_eta = sqrt_psd(scenario.system.sigma_eta);
  const ConvexPolytope eroded = pontryagin_difference(
      scenario.workspace, negated_support(scenario.agent_body));
  const ReferencePolicy baseline = ReferencePolicy::baseline_proportional();

  TrialContext ctx{scenario,
                   policy,
                   terminal,
                   model,
                   sqrt_w,
                   sqrt_eta,
                   eroded,
                   agent_body_radius(scenario),
                   {},
                   &baseline};
  for (const auto& o : scenario.obstacles) {
    ctx.obstacle_radii.push_back(obstacle_radius(o));
  }
  return run_trial_with_context(ctx, options);
}

CampaignSummary run_campaign(
    const Scenario& scenario, const ReferencePolicy& policy,
    const TerminalSets* terminal, const std::vector<ModeKey>& modes,
    int n_trials, std::uint64_t seed, int jobs, bool record_trajectories,
    std::vector<std::vector<TrialResult>>* results) {
  if (n_trials < 1) throw std::invalid_argument("run_campaign: n_trials < 1");
  for (const auto& key : modes) {
    if (key.terminal && key.mode != FilterMode::kUnfiltered &&
        terminal == nullptr) {
      throw std::invalid_argument("run_campaign: terminal sets required");
    }
  }
  jobs = std::max(jobs, 1);

  const PredictionModel model =
      PredictionModel::build(scenario.system, scenario.horizon());
  const Eigen::MatrixXd sqrt_w = sqrt_psd(scenario.system.sigma_w);
  const Eigen::MatrixXd sqrt_eta = sqrt_psd(scenario.system.sigma_eta);
  const ConvexPolytope eroded = pontryagin_difference(
      scenario.workspace, negated_support(scenario.agent_body));
  const ReferencePolicy baseline = ReferencePolicy::baseline_proportional();
  TrialContext ctx{scenario,
                   policy,
                   terminal,
                   model,
                   sqrt_w,
                   sqrt_eta,
                   eroded,
                   agent_body_radius(scenario),
                   {},
                   &baseline};
  for (const auto& o : scenario.obstacles) {
    ctx.obstacle_radii.push_back(obstacle_radius(o));
  }

  CampaignSummary summary;
  summary.n_trials = n_trials;
  summary.seed = seed;
  if (results != nullptr) results->clear();

  for (const auto& key : modes) {
    std::vector<TrialResult> trial_results(n_trials);
    std::atomic<int> next{0};
    const auto worker = [&] {
      for (;;) {
        const int t = next.fetch_add(1);
        if (t >= n_trials) return;
        TrialOptions options;
        options.mode = key.mode;
        options.terminal_constraints = key.terminal;
        options.seed = seed;
        options.trial_index = static_cast<std::uint64_t>(t);
        options.record_trajectory = record_trajectories;
        trial_results[t] = run_trial_with_context(ctx, options);
      }
    };
    if (jobs == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(jobs);
      for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    ModeSummary mode_summary;
    mode_summary.label = key.label();
    mode_summary.n_trials = n_trials;
    std::vector<double> completion, min_obstacle, min_agent;
    std::vector<double> setup_all, solve_all, tick_all;
    const double body_diameter = 2.0 * ctx.body_radius;
    for (const auto& r : trial_results) {
      ++mode_summary.outcome_counts[static_cast<int>(r.outcome)];
      mode_summary.tallies.add(r.tallies);
      mode_summary.degraded_ticks += r.degraded_ticks;
      mode_summary.max_kkt_stationarity =
          std::max(mode_summary.max_kkt_stationarity, r.max_kkt_stationarity);
      mode_summary.max_kkt_primal =
          std::max(mode_summary.max_kkt_primal, r.max_kkt_primal);
      mode_summary.max_kkt_complementarity =
          std::max(mode_summary.max_kkt_complementarity,
                   r.max_kkt_complementarity);
      for (std::size_t i = 0; i < r.setup_seconds.size(); ++i) {
        setup_all.push_back(r.setup_seconds[i]);
        solve_all.push_back(r.solve_seconds[i]);
        tick_all.push_back(r.setup_seconds[i] + r.solve_seconds[i]);
      }
      if (r.outcome == TrialOutcome::kSuccess) {
        ++mode_summary.n_success;
        completion.push_back(static_cast<double>(r.completion_ticks));
        min_obstacle.push_back(r.min_obstacle_clearance);
        min_agent.push_back(r.min_agent_clearance + body_diameter);
      }
    }
    mode_summary.success_percent =
        100.0 * mode_summary.n_success / static_cast<double>(n_trials);
    const auto pct3 = [](std::vector<double> v) -> std::array<double, 3> {
      if (v.empty()) return {0.0, 0.0, 0.0};
      return {percentile(v, 5), percentile(v, 50), percentile(v, 95)};
    };
    mode_summary.completion_ticks = pct3(completion);
    mode_summary.min_obstacle_separation = pct3(min_obstacle);
    mode_summary.min_agent_separation = pct3(min_agent);
    mode_summary.setup_seconds = pct3(setup_all);
    mode_summary.solve_seconds = pct3(solve_all);
    mode_summary.tick_seconds = pct3(tick_all);
    summary.modes.push_back(std::move(mode_summary));
    if (results != nullptr) results->push_back(std::move(trial_results));
  }
  return summary;
}

ClearanceSeries clearance_metrics(const std::vector<TrajectoryRow>& trajectory,
                                  const Scenario& scenario) {
  if (trajectory.empty()) {
    throw std::invalid_argument("clearance_metrics: empty trajectory");
  }
  const int num_agents = scenario.n_agents;
  const int num_obstacles = static_cast<int>(scenario.obstacles.size());
  int max_tick = 0;
  for (const auto& row : trajectory) max_tick = std::max(max_tick, row.tick);

  // positions[tick][agent]
  std::vector<std::vector<Eigen::Vector2d>> positions(
      max_tick + 1, std::vector<Eigen::Vector2d>(num_agents));
  for (const auto& row : trajectory) {
    positions[row.tick][row.agent] = Eigen::Vector2d(row.px, row.py);
  }

  double body_radius = 0.0;
  if (const auto* ball = std::get_if<Ball>(&scenario.agent_body)) {
    body_radius = ball->radius;
  }
  std::vector<double> obstacle_radii;
  for (const auto& o : scenario.obstacles) {
    if (const auto* ball = std::get_if<Ball>(&o.shape)) {
      obstacle_radii.push_back(ball->radius);
    } else {
      obstacle_radii.push_back(0.0);
    }
  }

  ClearanceSeries series;
  series.min_agent_clearance = std::numeric_limits<double>::infinity();
  series.min_obstacle_clearance = std::numeric_limits<double>::infinity();
  for (int i = 0; i < num_agents; ++i) {
    for (int j = 0; j < i; ++j) {
      series.pair_labels.push_back(std::to_string(i) + "-" +
                                   std::to_string(j));
    }
  }
  for (int t = 0; t <= max_tick; ++t) {
    std::vector<double> pairs;
    for (int i = 0; i < num_agents; ++i) {
      for (int j = 0; j < i; ++j) {
        const double c =
            (positions[t][i] - positions[t][j]).norm() - 2.0 * body_radius;
        pairs.push_back(c);
        series.min_agent_clearance = std::min(series.min_agent_clearance, c);
      }
    }
    std::vector<double> obstacle;
    for (int i = 0; i < num_agents; ++i) {
      for (int j = 0; j < num_obstacles; ++j) {
        const double c =
            (positions[t][i] - scenario.obstacles[j].mean_center).norm() -
            obstacle_radii[j] - body_radius;
        obstacle.push_back(c);
        series.min_obstacle_clearance =
            std::min(series.min_obstacle_clearance, c);
      }
    }
    series.agent_pairs.push_back(std::move(pairs));
    series.obstacle.push_back(std::move(obstacle));
  }
  return series;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) {
    throw std::invalid_argument("percentile: empty sample");
  }
  std::sort(values.begin(), values.end());
  const double rank =
      std::clamp(p, 0.0, 100.0) / 100.0 * (values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace pssf
