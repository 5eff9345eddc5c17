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

#include "pssf/constraints.hpp"

#include <cmath>
#include <sstream>

namespace pssf {

PredictionModel PredictionModel::build(const LinearSystem& sys, int horizon) {
  PredictionModel model;
  const int n = sys.state_dim();
  model.a_pow.reserve(horizon + 1);
  model.a_pow.push_back(Eigen::MatrixXd::Identity(n, n));
  for (int k = 1; k <= horizon; ++k) {
    model.a_pow.push_back(sys.A * model.a_pow.back());
  }

  model.pos_maps.resize(horizon + 1);
  for (int k = 0; k <= horizon; ++k) {
    model.pos_maps[k].reserve(k);
    for (int s = 0; s < k; ++s) {
      model.pos_maps[k].push_back(sys.C * model.a_pow[k - 1 - s] * sys.B);
    }
  }
  model.state_maps.reserve(horizon);
  for (int s = 0; s < horizon; ++s) {
    model.state_maps.push_back(model.a_pow[horizon - 1 - s] * sys.B);
  }

  model.cov_state.reserve(horizon + 1);
  model.cov_state.push_back(sys.sigma_eta);
  for (int k = 1; k <= horizon; ++k) {
    Eigen::MatrixXd next =
        sys.A * model.cov_state.back() * sys.A.transpose() + sys.sigma_w;
    model.cov_state.push_back(0.5 * (next + next.transpose().eval()));
  }
  model.cov_pos.reserve(horizon + 1);
  for (int k = 0; k <= horizon; ++k) {
    model.cov_pos.push_back(sys.C * model.cov_state[k] * sys.C.transpose());
  }
  return model;
}

Eigen::VectorXd PredictionModel::position_mean(
    const LinearSystem& sys, const Eigen::VectorXd& measurement,
    const Eigen::MatrixXd& controls, int k) const {
  Eigen::VectorXd p = sys.C * (a_pow[k] * measurement);
  for (int s = 0; s < k; ++s) {
    p += pos_maps[k][s] * controls.col(s);
  }
  return p;
}

namespace {

Eigen::VectorXd fallback_direction(int i, int j, int n_agents, int dim) {
  const double angle =
      2.0 * M_PI * static_cast<double>(i * 31 + j) /
      (static_cast<double>(n_agents) * 37.0);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(dim);
  dir(0) = std::cos(angle);
  dir(1) = std::sin(angle);
  return dir;
}

Eigen::VectorXd unit_or_fallback(const Eigen::VectorXd& delta, int i, int j,
                                 int n_agents) {
  const double norm = delta.norm();
  if (norm < 1e-12) {
    return fallback_direction(i, j, n_agents, static_cast<int>(delta.size()));
  }
  return delta / norm;
}

Eigen::MatrixXd lift_cov(const Eigen::MatrixXd& cov_pos, int state_dim) {
  Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(state_dim, state_dim);
  lifted.topLeftCorner(cov_pos.rows(), cov_pos.cols()) = cov_pos;
  return lifted;
}

Eigen::VectorXd lift_center(const Eigen::VectorXd& c, int state_dim) {
  Eigen::VectorXd lifted = Eigen::VectorXd::Zero(state_dim);
  lifted.head(c.size()) = c;
  return lifted;
}

}  // namespace

DirectionBundle convexification_directions(const Plan& plan,
                                           const Scenario& scenario, int step) {
  const LinearSystem& sys = scenario.system;
  const int n = sys.state_dim();
  const int num_agents = scenario.n_agents;
  const int num_obstacles = static_cast<int>(scenario.obstacles.size());
  DirectionBundle bundle;
  bundle.obstacle_position.resize(num_agents);
  bundle.obstacle_state.resize(num_agents);
  bundle.agent_position.resize(num_agents);
  bundle.agent_state.resize(num_agents);

  for (int i = 0; i < num_agents; ++i) {
    const Eigen::VectorXd state_i = plan.states[i].col(step);
    const Eigen::VectorXd pos_i = sys.C * state_i;
    bundle.obstacle_position[i].reserve(num_obstacles);
    bundle.obstacle_state[i].reserve(num_obstacles);
    for (int j = 0; j < num_obstacles; ++j) {
      const Eigen::VectorXd& center = scenario.obstacles[j].mean_center;
      bundle.obstacle_position[i].push_back(
          unit_or_fallback(pos_i - center, i, j, num_agents));
      bundle.obstacle_state[i].push_back(
          unit_or_fallback(state_i - lift_center(center, n), i, j, num_agents));
    }
    bundle.agent_position[i].resize(i);
    bundle.agent_state[i].resize(i);
    for (int j = 0; j < i; ++j) {
      const Eigen::VectorXd state_j = plan.states[j].col(step);
      bundle.agent_position[i][j] =
          unit_or_fallback(pos_i - sys.C * state_j, i, j, num_agents);
      bundle.agent_state[i][j] =
          unit_or_fallback(state_i - state_j, i, j, num_agents);
    }
  }
  return bundle;
}

LinearConstraintSet build_prop1_constraints(const Plan& plan,
                                            const PredictionModel& model,
                                            const Scenario& scenario) {
  const LinearSystem& sys = scenario.system;
  const int T = scenario.horizon();
  const int num_agents = scenario.n_agents;
  const int num_obstacles = static_cast<int>(scenario.obstacles.size());
  const int num_walls = scenario.workspace.num_halfspaces();
  const int m = sys.input_dim();

  VariableMap map{num_agents, T, m};
  const int per_step = num_agents * num_obstacles +
                       num_agents * (num_agents - 1) / 2 +
                       num_agents * num_walls;
  const int total_rows = (T + 1) * per_step;

  LinearConstraintSet set;
  set.map = map;
  set.coeffs = Eigen::MatrixXd::Zero(total_rows, map.size());
  set.upper = Eigen::VectorXd::Zero(total_rows);
  set.info.reserve(total_rows);

  const double alpha_step = scenario.risk.per_step_obstacle();
  const double beta_step = scenario.risk.per_step_agent();
  const double kappa_wall = scenario.risk.per_step_keepin() / num_walls;

  int row = 0;
  for (int k = 0; k <= T; ++k) {
    const DirectionBundle dirs = convexification_directions(plan, scenario, k);
    const Eigen::MatrixXd& cov_p = model.cov_pos[k];

    // Static obstacle avoidance.
    for (int i = 0; i < num_agents; ++i) {
      const Eigen::VectorXd base =
          sys.C * (model.a_pow[k] * plan.states[i].col(0));
      for (int j = 0; j < num_obstacles; ++j) {
        const auto& obstacle = scenario.obstacles[j];
        const Eigen::VectorXd& z = dirs.obstacle_position[i][j];
        const double margin = support(obstacle.shape, z) +
                              support(scenario.agent_body, -z);
        const TightenedHalfspace tight = tighten_upper(
            z, margin, cov_p + obstacle.center_cov, alpha_step,
            ConstraintKind::kObstacle);
        // z.(p_i - c_j) >= offset  ->  -z.(sum maps u) <= z.base - c.z - offset
        for (int s = 0; s < k; ++s) {
          set.coeffs.block(row, map.column(i, s, 0), 1, m) -=
              z.transpose() * model.pos_maps[k][s];
        }
        set.upper(row) =
            z.dot(base) - z.dot(obstacle.mean_center) - tight.offset;
        set.info.push_back({i, k, ConstraintKind::kObstacle, j});
        ++row;
      }
    }

    // Inter-agent avoidance, one row per unordered pair (i > j).
    for (int i = 0; i < num_agents; ++i) {
      const Eigen::VectorXd base_i =
          sys.C * (model.a_pow[k] * plan.states[i].col(0));
      for (int j = 0; j < i; ++j) {
        const Eigen::VectorXd base_j =
            sys.C * (model.a_pow[k] * plan.states[j].col(0));
        const Eigen::VectorXd& z = dirs.agent_position[i][j];
        const double margin = support(scenario.agent_body, z) +
                              support(scenario.agent_body, -z);
        const TightenedHalfspace tight =
            tighten_upper(z, margin, 2.0 * cov_p, beta_step,
                          ConstraintKind::kAgent);
        for (int s = 0; s < k; ++s) {
          const Eigen::RowVectorXd zP = z.transpose() * model.pos_maps[k][s];
          set.coeffs.block(row, map.column(i, s, 0), 1, m) -= zP;
          set.coeffs.block(row, map.column(j, s, 0), 1, m) += zP;
        }
        set.upper(row) = z.dot(base_i - base_j) - tight.offset;
        set.info.push_back({i, k, ConstraintKind::kAgent, j});
        ++row;
      }
    }

    // Keep-in walls with the per-wall risk split.
    for (int i = 0; i < num_agents; ++i) {
      const Eigen::VectorXd base =
          sys.C * (model.a_pow[k] * plan.states[i].col(0));
      for (int w = 0; w < num_walls; ++w) {
        const Eigen::VectorXd g = scenario.workspace.normals().row(w).transpose();
        const double wall =
            scenario.workspace.offsets()(w) - support(scenario.agent_body, g);
        const TightenedHalfspace tight =
            tighten_lower(g, wall, cov_p, kappa_wall, ConstraintKind::kKeepIn);
        for (int s = 0; s < k; ++s) {
          set.coeffs.block(row, map.column(i, s, 0), 1, m) +=
              g.transpose() * model.pos_maps[k][s];
        }
        set.upper(row) = tight.offset - g.dot(base);
        set.info.push_back({i, k, ConstraintKind::kKeepIn, w});
        ++row;
      }
    }
  }
  return set;
}

LinearConstraintSet build_prop2_constraints(const Plan& plan,
                                            const TerminalSets& terminal,
                                            const PredictionModel& model,
                                            const Scenario& scenario) {
  const LinearSystem& sys = scenario.system;
  const int T = scenario.horizon();
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  const int num_agents = scenario.n_agents;
  const int num_obstacles = static_cast<int>(scenario.obstacles.size());
  if (static_cast<int>(terminal.avoid_obstacle.size()) != num_obstacles) {
    throw std::invalid_argument(
        "build_prop2_constraints: terminal sets missing obstacle ellipsoids");
  }
  const int num_viab = terminal.viability.num_halfspaces();
  const double delta = scenario.risk.delta_terminal;

  VariableMap map{num_agents, T, m};
  const int total_rows = num_agents * num_obstacles +
                         num_agents * (num_agents - 1) / 2 +
                         num_agents * num_viab;
  LinearConstraintSet set;
  set.map = map;
  set.coeffs = Eigen::MatrixXd::Zero(total_rows, map.size());
  set.upper = Eigen::VectorXd::Zero(total_rows);
  set.info.reserve(total_rows);

  const DirectionBundle dirs = convexification_directions(plan, scenario, T);
  const Eigen::MatrixXd& cov_x = model.cov_state[T];

  int row = 0;
  for (int i = 0; i < num_agents; ++i) {
    const Eigen::VectorXd base = model.a_pow[T] * plan.states[i].col(0);
    for (int j = 0; j < num_obstacles; ++j) {
      const auto& obstacle = scenario.obstacles[j];
      const Eigen::VectorXd& l = dirs.obstacle_state[i][j];
      const double margin = support(terminal.avoid_obstacle[j], l);
      const Eigen::MatrixXd cov =
          cov_x + lift_cov(obstacle.center_cov, n);
      const TightenedHalfspace tight = tighten_upper(
          l, margin, cov, delta, ConstraintKind::kTerminalObstacle);
      for (int s = 0; s < T; ++s) {
        set.coeffs.block(row, map.column(i, s, 0), 1, m) -=
            l.transpose() * model.state_maps[s];
      }
      set.upper(row) = l.dot(base) -
                       l.dot(lift_center(obstacle.mean_center, n)) -
                       tight.offset;
      set.info.push_back({i, T, ConstraintKind::kTerminalObstacle, j});
      ++row;
    }
  }

  for (int i = 0; i < num_agents; ++i) {
    const Eigen::VectorXd base_i = model.a_pow[T] * plan.states[i].col(0);
    for (int j = 0; j < i; ++j) {
      const Eigen::VectorXd base_j = model.a_pow[T] * plan.states[j].col(0);
      const Eigen::VectorXd& l = dirs.agent_state[i][j];
      const double margin = support(terminal.avoid_agent, l);
      const TightenedHalfspace tight = tighten_upper(
          l, margin, 2.0 * cov_x, delta, ConstraintKind::kTerminalAgent);
      for (int s = 0; s < T; ++s) {
        const Eigen::RowVectorXd lS = l.transpose() * model.state_maps[s];
        set.coeffs.block(row, map.column(i, s, 0), 1, m) -= lS;
        set.coeffs.block(row, map.column(j, s, 0), 1, m) += lS;
      }
      set.upper(row) = l.dot(base_i - base_j) - tight.offset;
      set.info.push_back({i, T, ConstraintKind::kTerminalAgent, j});
      ++row;
    }
  }

  for (int i = 0; i < num_agents; ++i) {
    const Eigen::VectorXd base = model.a_pow[T] * plan.states[i].col(0);
    for (int w = 0; w < num_viab; ++w) {
      const Eigen::VectorXd g = terminal.viability.normals().row(w).transpose();
      const TightenedHalfspace tight =
          tighten_lower(g, terminal.viability.offsets()(w), cov_x,
                        delta / num_viab, ConstraintKind::kTerminalViability);
      for (int s = 0; s < T; ++s) {
        set.coeffs.block(row, map.column(i, s, 0), 1, m) +=
            g.transpose() * model.state_maps[s];
      }
      set.upper(row) = tight.offset - g.dot(base);
      set.info.push_back({i, T, ConstraintKind::kTerminalViability, w});
      ++row;
    }
  }
  return set;
}

LinearConstraintSet concatenate(const LinearConstraintSet& a,
                                const LinearConstraintSet& b) {
  if (b.rows() == 0) return a;
  if (a.rows() == 0) return b;
  if (a.map.size() != b.map.size()) {
    throw std::invalid_argument("concatenate: variable maps differ");
  }
  LinearConstraintSet out;
  out.map = a.map;
  out.coeffs.resize(a.rows() + b.rows(), a.coeffs.cols());
  out.coeffs << a.coeffs, b.coeffs;
  out.upper.resize(a.upper.size() + b.upper.size());
  out.upper << a.upper, b.upper;
  out.info = a.info;
  out.info.insert(out.info.end(), b.info.begin(), b.info.end());
  return out;
}

std::string dump_constraints(const LinearConstraintSet& set) {
  static const char* kKindNames[] = {"obstacle", "agent", "keepin",
                                     "terminal-obstacle", "terminal-agent",
                                     "terminal-viability"};
  std::ostringstream out;
  out.precision(12);
  out << "# pssf-constraints-v1 rows=" << set.rows()
      << " cols=" << set.coeffs.cols() << "\n";
  for (int r = 0; r < set.rows(); ++r) {
    const RowInfo& info = set.info[r];
    out << kKindNames[static_cast<int>(info.kind)] << " agent=" << info.agent
        << " step=" << info.step << " counterpart=" << info.counterpart
        << " :";
    for (int c = 0; c < set.coeffs.cols(); ++c) {
      out << " " << set.coeffs(r, c);
    }
    out << " <= " << set.upper(r) << "\n";
  }
  return out.str();
}

}  // namespace pssf
