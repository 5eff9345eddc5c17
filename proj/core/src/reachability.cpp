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

#include "pssf/reachability.hpp"

#include <cmath>
#include <sstream>

#include "pssf/log.hpp"

namespace pssf {

namespace {

void push_direction(const Eigen::VectorXd& d,
                    std::vector<Eigen::VectorXd>& directions) {
  for (const auto& e : directions) {
    if ((d - e).lpNorm<Eigen::Infinity>() < 1e-9) return;
  }
  directions.push_back(d);
}

// Rows of `p`, unit-normalized, appended to `directions` with dedup.
void harvest_directions(const ConvexPolytope& p,
                        std::vector<Eigen::VectorXd>& directions) {
  for (int i = 0; i < p.num_halfspaces(); ++i) {
    push_direction(p.normals().row(i).normalized().transpose(), directions);
  }
}

// Unit directions mixing planar position and velocity components. The
// inevitable-entry funnel has slanted facets (position gap traded against
// closing speed); slabs along these keep the template outer set from
// acquiring spurious position-velocity corners.
void mixed_direction_bank(int state_dim,
                          std::vector<Eigen::VectorXd>& directions) {
  const int d = state_dim / 2;
  std::vector<Eigen::VectorXd> planar;
  if (d == 1) {
    planar.push_back(Eigen::VectorXd::Constant(1, 1.0));
    planar.push_back(Eigen::VectorXd::Constant(1, -1.0));
  } else {
    for (int i = 0; i < 8; ++i) {
      const double theta = 2.0 * M_PI * i / 8;
      Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
      v(0) = std::cos(theta);
      v(1) = std::sin(theta);
      planar.push_back(v);
    }
  }
  const double mix[] = {0.0, M_PI / 8, M_PI / 4, 3 * M_PI / 8, M_PI / 2};
  for (const auto& pos : planar) {
    for (const auto& vel : planar) {
      for (double theta : mix) {
        Eigen::VectorXd dir = Eigen::VectorXd::Zero(state_dim);
        dir.head(d) = std::cos(theta) * pos;
        dir.tail(d) = std::sin(theta) * vel;
        const double norm = dir.norm();
        if (norm < 1e-12) continue;
        push_direction(dir / norm, directions);
      }
    }
  }
}

}  // namespace

Ellipsoid avoid_set_outer(const LinearSystem& sys,
                          const ConvexPolytope& control_set,
                          const ConvexPolytope& seed,
                          const ConvexPolytope& domain, int max_iters,
                          AvoidSetInfo* info) {
  if (!is_bounded(seed)) {
    throw std::invalid_argument("avoid_set_outer: seed must be bounded");
  }
  const SupportFunction bu_support =
      mapped_support(sys.B, ConvexSet(control_set));
  const auto backstep = [&](const ConvexPolytope& target) {
    return intersect(
        affine_preimage(pontryagin_difference(target, bu_support), sys.A),
        domain);
  };

  // Pass 1: the plain backward chain, harvested for template normals. The
  // sheared iterate facets are exactly the directions the closure needs.
  std::vector<Eigen::VectorXd> directions;
  harvest_directions(seed, directions);
  harvest_directions(domain, directions);
  {
    ConvexPolytope chain = seed;
    for (int iter = 0; iter < max_iters; ++iter) {
      ConvexPolytope next = backstep(chain);
      if (is_empty(next)) break;
      next = prune_redundant(next);
      harvest_directions(next, directions);
      chain = next;
    }
  }

  // Pass 2: union closure over the template polytope. Inevitable-entry
  // states may reach the seed at control-dependent times, so each sweep
  // folds the one-step predecessors back into the accumulated outer set:
  // O_{k+1} >= O_k union (Pre(O_k) within the domain), which dominates the
  // truncated dynamic-programming recursion by induction.
  const int n_dirs = static_cast<int>(directions.size());
  Eigen::MatrixXd template_normals(n_dirs, seed.dim());
  Eigen::VectorXd offsets(n_dirs);
  for (int i = 0; i < n_dirs; ++i) {
    template_normals.row(i) = directions[i].transpose();
    offsets(i) = support(seed, directions[i]);
  }

  AvoidSetInfo local;
  for (int iter = 0; iter < max_iters; ++iter) {
    const ConvexPolytope outer(template_normals, offsets);
    ConvexPolytope pre = backstep(outer);
    local.iterations = iter + 1;
    if (is_empty(pre)) break;
    pre = prune_redundant(pre);
    bool grew = false;
    for (int i = 0; i < n_dirs; ++i) {
      const double s = support(pre, directions[i]);
      if (s > offsets(i) + 1e-12) {
        offsets(i) = s;
        grew = true;
      }
    }
    if (!grew) break;
    if (iter + 1 == max_iters) {
      local.cap_hit = true;
      log_info("avoid_set_outer: iteration cap reached; result is an outer "
               "approximation over the executed iterations only");
    }
  }
  if (info != nullptr) *info = local;

  const ConvexPolytope accumulated =
      prune_redundant(ConvexPolytope(template_normals, offsets));
  const auto vertices = enumerate_vertices(accumulated);
  return min_volume_enclosing_ellipsoid(vertices);
}

ConvexPolytope pre_set(const LinearSystem& sys,
                       const ConvexPolytope& control_set,
                       const ConvexPolytope& target) {
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  const int rows_t = target.num_halfspaces();
  const int rows_u = control_set.num_halfspaces();
  Eigen::MatrixXd normals(rows_t + rows_u, n + m);
  Eigen::VectorXd offsets(rows_t + rows_u);
  normals.block(0, 0, rows_t, n) = target.normals() * sys.A;
  normals.block(0, n, rows_t, m) = target.normals() * sys.B;
  offsets.head(rows_t) = target.offsets();
  normals.block(rows_t, 0, rows_u, n).setZero();
  normals.block(rows_t, n, rows_u, m) = control_set.normals();
  offsets.tail(rows_u) = control_set.offsets();
  return project_onto_first(ConvexPolytope(std::move(normals), std::move(offsets)),
                            n);
}

ConvexPolytope viability_set(const LinearSystem& sys,
                             const ConvexPolytope& control_set,
                             const ConvexPolytope& good_seed, int max_iters,
                             ViabilityInfo* info) {
  ViabilityInfo local;
  if (is_empty(good_seed)) {
    if (info != nullptr) *info = local;
    return good_seed;
  }
  const ConvexPolytope good = prune_redundant(good_seed);
  ConvexPolytope current = good;
  for (int iter = 1; iter <= max_iters; ++iter) {
    const ConvexPolytope pre = pre_set(sys, control_set, current);
    ConvexPolytope next = intersect(good, pre);
    if (is_empty(next)) {
      local.iterations = iter;
      if (info != nullptr) *info = local;
      return next;
    }
    next = prune_redundant(next);
    if (contained_in(current, next, 1e-8)) {  // next <= current holds by construction
      local.iterations = iter;
      if (info != nullptr) *info = local;
      return next;
    }
    current = next;
  }
  throw NonConvergenceError("viability_set: no fixed point within iteration cap");
}

ConvexPolytope lift_position_polytope(const ConvexPolytope& p, int state_dim) {
  Eigen::MatrixXd normals = Eigen::MatrixXd::Zero(p.num_halfspaces(), state_dim);
  normals.leftCols(p.dim()) = p.normals();
  return ConvexPolytope(std::move(normals), p.offsets());
}

ConvexPolytope inflate_to_polygon(const ConvexSet& shape,
                                  const ConvexSet& agent_body, int sides) {
  Eigen::MatrixXd normals(sides, 2);
  Eigen::VectorXd offsets(sides);
  for (int i = 0; i < sides; ++i) {
    const double theta = 2.0 * M_PI * i / sides;
    Eigen::VectorXd dir(2);
    dir << std::cos(theta), std::sin(theta);
    normals.row(i) = dir.transpose();
    offsets(i) = support(shape, dir) + support(agent_body, -dir);
  }
  return ConvexPolytope(std::move(normals), std::move(offsets));
}

namespace {

ConvexPolytope velocity_box(int state_dim, int output_dim, double bound) {
  const int vel_dims = state_dim - output_dim;
  Eigen::MatrixXd normals = Eigen::MatrixXd::Zero(2 * vel_dims, state_dim);
  Eigen::VectorXd offsets(2 * vel_dims);
  for (int k = 0; k < vel_dims; ++k) {
    normals(2 * k, output_dim + k) = 1.0;
    offsets(2 * k) = bound;
    normals(2 * k + 1, output_dim + k) = -1.0;
    offsets(2 * k + 1) = bound;
  }
  return ConvexPolytope(std::move(normals), std::move(offsets));
}

}  // namespace

TerminalSets build_terminal_sets(const Scenario& scenario, int max_iters) {
  const LinearSystem& sys = scenario.system;
  const int n = sys.state_dim();
  const int d = sys.output_dim();
  constexpr int kSeedPolygonSides = 16;

  const ConvexPolytope vel_box =
      velocity_box(n, d, scenario.velocity_bound);
  const ConvexPolytope domain =
      intersect(lift_position_polytope(scenario.workspace, n), vel_box);

  TerminalSets sets;
  sets.meta.velocity_bound = scenario.velocity_bound;

  for (const auto& obstacle : scenario.obstacles) {
    const ConvexPolytope seed_2d =
        inflate_to_polygon(obstacle.shape, scenario.agent_body,
                           kSeedPolygonSides);
    const ConvexPolytope seed =
        intersect(lift_position_polytope(seed_2d, n), vel_box);
    AvoidSetInfo info;
    sets.avoid_obstacle.push_back(
        avoid_set_outer(sys, scenario.control_set, seed, domain, max_iters,
                        &info));
    sets.meta.avoid_obstacle_iterations.push_back(info.iterations);
    sets.meta.avoid_obstacle_cap_hit.push_back(info.cap_hit);
  }

  {
    const ConvexPolytope seed_2d = inflate_to_polygon(
        scenario.agent_body, scenario.agent_body, kSeedPolygonSides);
    const ConvexPolytope seed =
        intersect(lift_position_polytope(seed_2d, n), vel_box);
    AvoidSetInfo info;
    sets.avoid_agent = avoid_set_outer(sys, scenario.control_set, seed, domain,
                                       max_iters, &info);
    sets.meta.avoid_agent_iterations = info.iterations;
    sets.meta.avoid_agent_cap_hit = info.cap_hit;
  }

  {
    const ConvexPolytope eroded = pontryagin_difference(
        scenario.workspace, negated_support(scenario.agent_body));
    const ConvexPolytope good =
        intersect(lift_position_polytope(eroded, n), vel_box);
    ViabilityInfo info;
    sets.viability =
        viability_set(sys, scenario.control_set, good, max_iters, &info);
    sets.meta.viability_iterations = info.iterations;
  }
  return sets;
}

namespace {

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << " " << m.cols();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << " " << m(i, j);
  }
  out << "\n";
}

Eigen::MatrixXd read_matrix(std::istream& in) {
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0) {
    throw std::runtime_error("terminal-sets cache: malformed matrix header");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(in >> m(i, j))) {
        throw std::runtime_error("terminal-sets cache: truncated matrix");
      }
    }
  }
  return m;
}

void write_ellipsoid(std::ostream& out, const Ellipsoid& e) {
  write_matrix(out, e.center());
  write_matrix(out, e.shape());
}

Ellipsoid read_ellipsoid(std::istream& in) {
  const Eigen::MatrixXd center = read_matrix(in);
  const Eigen::MatrixXd shape = read_matrix(in);
  return Ellipsoid(center.col(0), shape);
}

}  // namespace

std::string serialize_terminal_sets(const TerminalSets& sets,
                                    std::uint64_t scenario_hash_value) {
  std::ostringstream out;
  out.precision(17);
  out << kTerminalSetsFormatVersion << "\n";
  out << "scenario_hash " << scenario_hash_value << "\n";
  out << "velocity_bound " << sets.meta.velocity_bound << "\n";
  out << "avoid_obstacle " << sets.avoid_obstacle.size() << "\n";
  for (std::size_t j = 0; j < sets.avoid_obstacle.size(); ++j) {
    out << "iterations " << sets.meta.avoid_obstacle_iterations[j] << " cap "
        << (sets.meta.avoid_obstacle_cap_hit[j] ? 1 : 0) << "\n";
    write_ellipsoid(out, sets.avoid_obstacle[j]);
  }
  out << "avoid_agent\n";
  out << "iterations " << sets.meta.avoid_agent_iterations << " cap "
      << (sets.meta.avoid_agent_cap_hit ? 1 : 0) << "\n";
  write_ellipsoid(out, sets.avoid_agent);
  out << "viability iterations " << sets.meta.viability_iterations << "\n";
  write_matrix(out, sets.viability.normals());
  write_matrix(out, sets.viability.offsets());
  return out.str();
}

TerminalSets parse_terminal_sets(const std::string& content,
                                 std::uint64_t expected_hash) {
  std::istringstream in(content);
  std::string token;
  if (!(in >> token) || token != kTerminalSetsFormatVersion) {
    throw std::runtime_error("terminal-sets cache: version mismatch");
  }
  std::uint64_t hash = 0;
  if (!(in >> token >> hash) || token != "scenario_hash") {
    throw std::runtime_error("terminal-sets cache: missing scenario hash");
  }
  if (hash != expected_hash) {
    throw std::runtime_error("terminal-sets cache: scenario hash mismatch");
  }
  TerminalSets sets;
  double vel = 0.0;
  if (!(in >> token >> vel) || token != "velocity_bound") {
    throw std::runtime_error("terminal-sets cache: missing velocity bound");
  }
  sets.meta.velocity_bound = vel;

  std::size_t count = 0;
  if (!(in >> token >> count) || token != "avoid_obstacle") {
    throw std::runtime_error("terminal-sets cache: missing obstacle block");
  }
  for (std::size_t j = 0; j < count; ++j) {
    int iters = 0, cap = 0;
    std::string cap_token;
    if (!(in >> token >> iters >> cap_token >> cap) || token != "iterations" ||
        cap_token != "cap") {
      throw std::runtime_error("terminal-sets cache: malformed metadata");
    }
    sets.meta.avoid_obstacle_iterations.push_back(iters);
    sets.meta.avoid_obstacle_cap_hit.push_back(cap != 0);
    sets.avoid_obstacle.push_back(read_ellipsoid(in));
  }
  if (!(in >> token) || token != "avoid_agent") {
    throw std::runtime_error("terminal-sets cache: missing agent block");
  }
  {
    int iters = 0, cap = 0;
    std::string cap_token;
    if (!(in >> token >> iters >> cap_token >> cap) || token != "iterations" ||
        cap_token != "cap") {
      throw std::runtime_error("terminal-sets cache: malformed metadata");
    }
    sets.meta.avoid_agent_iterations = iters;
    sets.meta.avoid_agent_cap_hit = cap != 0;
    sets.avoid_agent = read_ellipsoid(in);
  }
  int viab_iters = 0;
  std::string iter_token;
  if (!(in >> token >> iter_token >> viab_iters) || token != "viability" ||
      iter_token != "iterations") {
    throw std::runtime_error("terminal-sets cache: missing viability block");
  }
  sets.meta.viability_iterations = viab_iters;
  const Eigen::MatrixXd normals = read_matrix(in);
  const Eigen::MatrixXd offsets = read_matrix(in);
  sets.viability = ConvexPolytope(normals, offsets.col(0));
  return sets;
}

}  // namespace pssf
