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

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "output_writers.hpp"
#include "pssf/log.hpp"
#include "pssf/reachability.hpp"
#include "pssf/scenario_text.hpp"
#include "pssf/simulator.hpp"
#include "svg_plot.hpp"

namespace fs = std::filesystem;
using namespace pssf;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitScenarioError = 2;
constexpr int kExitInternalError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError(0, "cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path.string());
  out << content;
}

/// Loads the cache when present and hash-consistent, otherwise rebuilds and
/// rewrites it.
TerminalSets load_or_build_terminal_sets(const Scenario& scenario,
                                         const fs::path& cache_path,
                                         bool* cache_hit) {
  const std::uint64_t hash = scenario_hash(scenario);
  if (fs::exists(cache_path)) {
    try {
      const TerminalSets sets =
          parse_terminal_sets(read_file(cache_path.string()), hash);
      if (cache_hit != nullptr) *cache_hit = true;
      log_info("terminal sets: cache hit at " + cache_path.string());
      return sets;
    } catch (const std::exception& e) {
      log_info(std::string("terminal sets: cache rejected (") + e.what() +
               "), rebuilding");
    }
  }
  if (cache_hit != nullptr) *cache_hit = false;
  const TerminalSets sets = build_terminal_sets(scenario);
  write_file(cache_path, serialize_terminal_sets(sets, hash));
  return sets;
}

struct RunArgs {
  std::string scenario_path;
  std::string mode = "filter";
  std::string terminal = "on";
  int trials = 100;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out_dir = "out";
  bool debug_qp = false;
  bool debug_constraints = false;
};

int cmd_run(const RunArgs& args) {
  const Scenario scenario = parse_scenario(read_file(args.scenario_path));
  const FilterMode mode = filter_mode_from_string(args.mode);
  if (args.terminal != "on" && args.terminal != "off") {
    throw ScenarioParseError(0, "--terminal expects on or off");
  }
  const bool terminal_on = args.terminal == "on";
  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir / "plots");

  TerminalSets terminal_sets;
  const TerminalSets* terminal_ptr = nullptr;
  if (terminal_on && mode != FilterMode::kUnfiltered) {
    terminal_sets = load_or_build_terminal_sets(
        scenario, out_dir / "terminal-sets.cache", nullptr);
    terminal_ptr = &terminal_sets;
  }
  const ReferencePolicy policy = make_policy(scenario);

  if (args.debug_qp || args.debug_constraints) {
    // Dump the first trial's per-tick problems before the campaign.
    TrialOptions options;
    options.mode = mode;
    options.terminal_constraints = terminal_on;
    options.seed = args.seed;
    options.trial_index = 0;
    if (args.debug_qp) {
      options.debug.on_qp = [&](int tick, const QpProblem& qp) {
        std::ostringstream name;
        name << "qp-tick" << tick << ".mm";
        write_file(out_dir / "debug" / name.str(), dump_qp(qp));
      };
    }
    if (args.debug_constraints) {
      options.debug.on_constraints = [&](int tick,
                                         const LinearConstraintSet& rows) {
        std::ostringstream name;
        name << "constraints-tick" << tick << ".txt";
        write_file(out_dir / "debug" / name.str(), dump_constraints(rows));
      };
    }
    run_trial(scenario, policy, terminal_ptr, options);
  }

  const std::vector<ModeKey> modes{{mode, terminal_on}};
  std::vector<std::vector<TrialResult>> results;
  const CampaignSummary summary =
      run_campaign(scenario, policy, terminal_ptr, modes, args.trials,
                   args.seed, args.jobs, /*record_trajectories=*/true,
                   &results);

  write_file(out_dir / "trajectories.csv",
             tools::trajectories_csv(results, modes));
  write_file(out_dir / "metrics.json", tools::metrics_json(summary));

  const auto& first_trajectory = results[0][0].trajectory;
  write_file(out_dir / "plots" / "trajectories.svg",
             tools::trajectory_overlay_svg(scenario, first_trajectory));
  write_file(out_dir / "plots" / "clearance.svg",
             tools::clearance_svg(clearance_metrics(first_trajectory,
                                                    scenario)));
  {
    std::vector<tools::TimingGroup> groups;
    const auto& m = summary.modes[0];
    groups.push_back({"setup", m.setup_seconds[0], m.setup_seconds[1],
                      m.setup_seconds[2]});
    groups.push_back({"solve", m.solve_seconds[0], m.solve_seconds[1],
                      m.solve_seconds[2]});
    groups.push_back({"total", m.tick_seconds[0], m.tick_seconds[1],
                      m.tick_seconds[2]});
    write_file(out_dir / "plots" / "timing.svg",
               tools::timing_svg(groups, summary.modes[0].label));
  }

  const auto& m = summary.modes[0];
  std::cout << m.label << ": success " << m.success_percent << "% over "
            << args.trials << " trials; median completion "
            << m.completion_ticks[1] << " ticks; median tick time "
            << m.tick_seconds[1] << " s\n";
  return kExitOk;
}

struct TerminalArgs {
  std::string scenario_path;
  std::string out_dir = "out";
};

int cmd_terminal_sets(const TerminalArgs& args) {
  const Scenario scenario = parse_scenario(read_file(args.scenario_path));
  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);
  bool cache_hit = false;
  TerminalSets sets;
  try {
    sets = load_or_build_terminal_sets(
        scenario, out_dir / "terminal-sets.cache", &cache_hit);
  } catch (const NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternalError;
  }
  std::cout << (cache_hit ? "cache hit\n" : "cache miss, built\n");
  for (std::size_t j = 0; j < sets.avoid_obstacle.size(); ++j) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        sets.avoid_obstacle[j].shape());
    std::cout << "avoid-obstacle[" << j << "] semi-axes:";
    for (int i = 0; i < eig.eigenvalues().size(); ++i) {
      std::cout << " " << std::sqrt(std::max(eig.eigenvalues()(i), 0.0));
    }
    std::cout << " (iterations "
              << sets.meta.avoid_obstacle_iterations[j]
              << (sets.meta.avoid_obstacle_cap_hit[j] ? ", cap hit" : "")
              << ")\n";
  }
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        sets.avoid_agent.shape());
    std::cout << "avoid-agent semi-axes:";
    for (int i = 0; i < eig.eigenvalues().size(); ++i) {
      std::cout << " " << std::sqrt(std::max(eig.eigenvalues()(i), 0.0));
    }
    std::cout << " (iterations " << sets.meta.avoid_agent_iterations
              << (sets.meta.avoid_agent_cap_hit ? ", cap hit" : "") << ")\n";
  }
  std::cout << "viability halfspaces: " << sets.viability.num_halfspaces()
            << " (iterations " << sets.meta.viability_iterations << ")\n";
  return kExitOk;
}

struct ScaleArgs {
  std::string scenario_path;
  std::string agents_list = "2,4,6,8,12,16,20,24";
  int ticks = 100;
  std::uint64_t seed = 0;
  std::string terminal = "on";
  std::string out_dir = "out";
};

/// Seeded random starts/targets, mutually separated and clear of obstacles.
void randomize_agents(Scenario& scenario, int n_agents, std::uint64_t seed) {
  RngStream stream(seed, static_cast<std::uint64_t>(n_agents), 0,
                   NoiseKind::kInit);
  Eigen::VectorXd dir(2);
  dir << 1, 0;
  const double xmax = support(scenario.workspace, dir) - 0.1;
  dir << -1, 0;
  const double xmin = -support(scenario.workspace, dir) + 0.1;
  dir << 0, 1;
  const double ymax = support(scenario.workspace, dir) - 0.1;
  dir << 0, -1;
  const double ymin = -support(scenario.workspace, dir) + 0.1;

  double body_radius = 0.01;
  if (const auto* ball = std::get_if<Ball>(&scenario.agent_body)) {
    body_radius = ball->radius;
  }
  const double agent_sep = std::max(2.0 * body_radius + 0.05, 0.12);
  const double target_sep = std::max(2.0 * body_radius + 0.25, 0.3);

  const auto sample_points = [&](double separation) {
    std::vector<Eigen::VectorXd> points;
    int attempts = 0;
    while (static_cast<int>(points.size()) < n_agents) {
      if (++attempts > 100000) {
        throw std::runtime_error(
            "randomize_agents: cannot place agents; workspace too crowded");
      }
      Eigen::VectorXd p(2);
      p << xmin + stream.uniform() * (xmax - xmin),
          ymin + stream.uniform() * (ymax - ymin);
      bool ok = true;
      for (const auto& o : scenario.obstacles) {
        double r = 0.0;
        if (const auto* ball = std::get_if<Ball>(&o.shape)) r = ball->radius;
        if ((p - o.mean_center).norm() < r + body_radius + 0.05) {
          ok = false;
          break;
        }
      }
      for (const auto& q : points) {
        if ((p - q).norm() < separation) {
          ok = false;
          break;
        }
      }
      if (ok) points.push_back(p);
    }
    return points;
  };

  const auto starts = sample_points(agent_sep);
  const auto targets = sample_points(target_sep);
  scenario.n_agents = n_agents;
  scenario.starts.clear();
  scenario.targets.clear();
  for (int i = 0; i < n_agents; ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    x.head(2) = starts[i];
    scenario.starts.push_back(x);
    scenario.targets.push_back(targets[i]);
  }
  scenario.validate();
}

int cmd_scale(const ScaleArgs& args) {
  const Scenario base = parse_scenario(read_file(args.scenario_path));
  const bool terminal_on = args.terminal == "on";
  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir / "plots");

  std::vector<int> counts;
  {
    std::stringstream ss(args.agents_list);
    std::string token;
    while (std::getline(ss, token, ',')) {
      const int n = std::stoi(token);
      if (n < 2) throw ScenarioParseError(0, "--agents entries must be >= 2");
      counts.push_back(n);
    }
  }
  if (counts.empty()) throw ScenarioParseError(0, "--agents list is empty");

  std::ostringstream csv;
  csv << "# pssf-scale-v1\n";
  csv << "agents,setup_p5,setup_p50,setup_p95,solve_p5,solve_p50,solve_p95,"
         "tick_p5,tick_p50,tick_p95\n";
  std::vector<tools::TimingGroup> groups;
  for (int n : counts) {
    Scenario scenario = base;
    randomize_agents(scenario, n, args.seed);
    TerminalSets sets;
    const TerminalSets* terminal_ptr = nullptr;
    if (terminal_on) {
      sets = build_terminal_sets(scenario);
      terminal_ptr = &sets;
    }
    const ReferencePolicy policy = make_policy(scenario);
    TrialOptions options;
    options.mode = FilterMode::kSafetyFilter;
    options.terminal_constraints = terminal_on;
    options.seed = args.seed;
    options.trial_index = 0;
    options.fixed_ticks = true;
    options.loiter_cap = args.ticks;
    const TrialResult result = run_trial(scenario, policy, terminal_ptr, options);

    std::vector<double> setup = result.setup_seconds;
    std::vector<double> solve = result.solve_seconds;
    std::vector<double> tick(setup.size());
    for (std::size_t i = 0; i < setup.size(); ++i) {
      tick[i] = setup[i] + solve[i];
    }
    csv << n;
    for (const auto* v : {&setup, &solve, &tick}) {
      csv << "," << percentile(*v, 5) << "," << percentile(*v, 50) << ","
          << percentile(*v, 95);
    }
    csv << "\n";
    groups.push_back({std::to_string(n), percentile(tick, 5),
                      percentile(tick, 50), percentile(tick, 95)});
    std::cout << "agents=" << n << " median tick " << percentile(tick, 50)
              << " s (p95 " << percentile(tick, 95) << " s) over "
              << args.ticks << " ticks\n";
  }
  write_file(out_dir / "scale.csv", csv.str());
  write_file(out_dir / "plots" / "scale.svg",
             tools::timing_svg(groups, "number of agents"));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "pssf: probabilistic multi-agent safety filter for reference motion "
      "plans"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand(
      "run", "Run a Monte-Carlo campaign and write artifacts");
  run->add_option("scenario", run_args.scenario_path, "scenario file")
      ->required();
  run->add_option("--mode", run_args.mode,
                  "filter | pure-mpc | unfiltered (default filter)");
  run->add_option("--terminal", run_args.terminal,
                  "terminal constraints on|off (default on)");
  run->add_option("--trials", run_args.trials, "number of trials");
  run->add_option("--seed", run_args.seed, "campaign seed");
  run->add_option("--jobs", run_args.jobs, "parallel trial workers");
  run->add_option("--out", run_args.out_dir, "output directory");
  run->add_flag("--debug-qp", run_args.debug_qp,
                "dump per-tick QPs of trial 0");
  run->add_flag("--debug-constraints", run_args.debug_constraints,
                "dump per-tick constraint rows of trial 0");

  TerminalArgs terminal_args;
  CLI::App* terminal = app.add_subcommand(
      "terminal-sets", "Build (or load) and describe the terminal sets");
  terminal->add_option("scenario", terminal_args.scenario_path, "scenario file")
      ->required();
  terminal->add_option("--out", terminal_args.out_dir, "output directory");

  ScaleArgs scale_args;
  CLI::App* scale = app.add_subcommand(
      "scale", "Per-tick timing versus team size with random placements");
  scale->add_option("scenario", scale_args.scenario_path, "scenario file")
      ->required();
  scale->add_option("--agents", scale_args.agents_list,
                    "comma-separated team sizes (default 2,4,6,8,12,16,20,24)");
  scale->add_option("--ticks", scale_args.ticks, "ticks per team size");
  scale->add_option("--seed", scale_args.seed, "placement/noise seed");
  scale->add_option("--terminal", scale_args.terminal,
                    "terminal constraints on|off (default on)");
  scale->add_option("--out", scale_args.out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (terminal->parsed()) return cmd_terminal_sets(terminal_args);
    if (scale->parsed()) return cmd_scale(scale_args);
  } catch (const ScenarioParseError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitScenarioError;
  } catch (const RolloutError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitScenarioError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitScenarioError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInternalError;
}
