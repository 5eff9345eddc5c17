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

#include <random>

#include "helpers.hpp"
#include "oracles/grid_dp.hpp"
#include "pssf/reachability.hpp"

using namespace pssf;

namespace {

LinearSystem double_integrator_1d(double ts) {
  LinearSystem sys;
  sys.ts = ts;
  sys.A = Eigen::MatrixXd::Identity(2, 2);
  sys.A(0, 1) = ts;
  sys.B = Eigen::MatrixXd(2, 1);
  sys.B << 0.5 * ts * ts, ts;
  sys.C = Eigen::MatrixXd::Zero(1, 2);
  sys.C(0, 0) = 1.0;
  sys.sigma_w = Eigen::MatrixXd::Zero(2, 2);
  sys.sigma_eta = Eigen::MatrixXd::Zero(2, 2);
  return sys;
}

}  // namespace

TEST_CASE("avoid set with huge control authority collapses to the seed") {
  const LinearSystem sys = double_integrator_1d(0.1);
  const ConvexPolytope seed = ConvexPolytope::axis_box(
      Eigen::Vector2d(-0.01, -0.01), Eigen::Vector2d(0.01, 0.01));
  const ConvexPolytope control = ConvexPolytope::centered_box(1, 100.0);
  const ConvexPolytope domain = ConvexPolytope::centered_box(2, 2.0);
  AvoidSetInfo info;
  const Ellipsoid e = avoid_set_outer(sys, control, seed, domain, 50, &info);
  CHECK(info.iterations == 1);
  CHECK_FALSE(info.cap_hit);
  const Ellipsoid direct =
      min_volume_enclosing_ellipsoid(enumerate_vertices(seed));
  CHECK((e.center() - direct.center()).lpNorm<Eigen::Infinity>() < 1e-9);
  CHECK((e.shape() - direct.shape()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("1-D double integrator: DP avoid states lie inside the ellipsoid") {
  const LinearSystem sys = double_integrator_1d(0.1);
  const double u_max = 1.0, v_max = 1.0, p_max = 1.5;
  const ConvexPolytope control = ConvexPolytope::centered_box(1, u_max);
  const ConvexPolytope seed = ConvexPolytope::axis_box(
      Eigen::Vector2d(-0.25, -v_max), Eigen::Vector2d(0.25, v_max));
  const ConvexPolytope domain = ConvexPolytope::axis_box(
      Eigen::Vector2d(-p_max, -v_max), Eigen::Vector2d(p_max, v_max));

  AvoidSetInfo info;
  const Ellipsoid ellipsoid =
      avoid_set_outer(sys, control, seed, domain, 200, &info);
  CHECK(info.iterations >= 2);

  pssf_oracle::Grid grid;
  grid.lo = Eigen::Vector2d(-p_max, -v_max);
  grid.hi = Eigen::Vector2d(p_max, v_max);
  grid.cells = {200, 200};
  const auto controls = pssf_oracle::control_grid_1d(u_max, 20);
  const auto avoid = pssf_oracle::avoid_dp(
      grid, sys.A, sys.B, controls,
      [&](const Eigen::VectorXd& x) { return std::abs(x(0)) <= 0.25; }, 50);

  long marked = 0, escapes = 0;
  for (long s = 0; s < grid.total(); ++s) {
    if (!avoid[s]) continue;
    ++marked;
    if (ellipsoid.quadratic_form(grid.point(s)) > 1.0 + 1e-8) ++escapes;
  }
  CHECK(grid.total() >= 40000);
  CHECK(marked > 1000);  // the oracle found a nontrivial avoid region
  CHECK(escapes == 0);
}

TEST_CASE("viability fixed point at an already-invariant seed") {
  // Single integrator x+ = x + ts u, |u| <= 1: the unit interval is
  // controlled-invariant, so the first iteration already agrees.
  LinearSystem sys;
  sys.ts = 0.1;
  sys.A = Eigen::MatrixXd::Identity(1, 1);
  sys.B = Eigen::MatrixXd::Constant(1, 1, 0.1);
  sys.C = Eigen::MatrixXd::Identity(1, 1);
  sys.sigma_w = Eigen::MatrixXd::Zero(1, 1);
  sys.sigma_eta = Eigen::MatrixXd::Zero(1, 1);
  const ConvexPolytope good = ConvexPolytope::centered_box(1, 1.0);
  ViabilityInfo info;
  const ConvexPolytope v =
      viability_set(sys, ConvexPolytope::centered_box(1, 1.0), good, 50, &info);
  CHECK(info.iterations == 1);
  CHECK(contained_in(v, good, 1e-9));
  CHECK(contained_in(good, v, 1e-9));
}

TEST_CASE("empty seed gives an empty viability set") {
  const LinearSystem sys = double_integrator_1d(0.1);
  const ConvexPolytope empty = ConvexPolytope::canonical_empty(2);
  const ConvexPolytope v =
      viability_set(sys, ConvexPolytope::centered_box(1, 1.0), empty, 50);
  CHECK(is_empty(v));
}

TEST_CASE("1-D double integrator viability matches the DP safe set") {
  const LinearSystem sys = double_integrator_1d(0.1);
  const double u_max = 1.0, v_max = 1.0, p_max = 1.4;
  const ConvexPolytope control = ConvexPolytope::centered_box(1, u_max);
  const ConvexPolytope good = ConvexPolytope::axis_box(
      Eigen::Vector2d(-p_max, -v_max), Eigen::Vector2d(p_max, v_max));

  ViabilityInfo info;
  const ConvexPolytope viability =
      viability_set(sys, control, good, 200, &info);
  CHECK(info.iterations >= 2);
  CHECK(contained_in(viability, good, 1e-8));

  // The corner with full speed toward the wall exits next step.
  Eigen::VectorXd corner(2);
  corner << p_max, v_max;
  CHECK_FALSE(viability.contains(corner, 1e-9));

  pssf_oracle::Grid grid;
  grid.lo = Eigen::Vector2d(-p_max, -v_max);
  grid.hi = Eigen::Vector2d(p_max, v_max);
  grid.cells = {200, 200};
  const auto controls = pssf_oracle::control_grid_1d(u_max, 20);
  const auto safe = pssf_oracle::safe_dp(
      grid, sys.A, sys.B, controls,
      [&](const Eigen::VectorXd& x) { return good.contains(x, 1e-12); }, 200);

  // Compare away from the polytope boundary (two cells of margin).
  const double cell =
      std::max(grid.step(0), grid.step(1));
  const double margin = 2.0 * cell;
  long compared = 0, mismatches = 0;
  for (long s = 0; s < grid.total(); ++s) {
    const Eigen::VectorXd x = grid.point(s);
    double inside_margin = 1e300;
    for (int i = 0; i < viability.num_halfspaces(); ++i) {
      const double norm = viability.normals().row(i).norm();
      inside_margin = std::min(
          inside_margin,
          (viability.offsets()(i) - viability.normals().row(i).dot(x)) / norm);
    }
    if (std::abs(inside_margin) < margin) continue;  // near the boundary
    ++compared;
    const bool inside = inside_margin > 0.0;
    if (inside != static_cast<bool>(safe[s])) ++mismatches;
  }
  CHECK(compared > 20000);
  CHECK(mismatches == 0);
}

TEST_CASE("DP identity: safe set is the complement of the complement-avoid") {
  const LinearSystem sys = double_integrator_1d(0.1);
  pssf_oracle::Grid grid;
  grid.lo = Eigen::Vector2d(-1.4, -1.0);
  grid.hi = Eigen::Vector2d(1.4, 1.0);
  grid.cells = {80, 80};
  const auto controls = pssf_oracle::control_grid_1d(1.0, 10);
  const ConvexPolytope good = ConvexPolytope::axis_box(
      Eigen::Vector2d(-1.2, -0.9), Eigen::Vector2d(1.2, 0.9));
  const auto safe = pssf_oracle::safe_dp(
      grid, sys.A, sys.B, controls,
      [&](const Eigen::VectorXd& x) { return good.contains(x, 1e-12); }, 300);
  const auto avoid_complement = pssf_oracle::avoid_dp(
      grid, sys.A, sys.B, controls,
      [&](const Eigen::VectorXd& x) { return !good.contains(x, 1e-12); }, 300);
  for (long s = 0; s < grid.total(); ++s) {
    CHECK(static_cast<bool>(safe[s]) !=
          static_cast<bool>(avoid_complement[s]));
  }
}

TEST_CASE("viability iterates shrink monotonically") {
  const LinearSystem sys = double_integrator_1d(0.1);
  const ConvexPolytope control = ConvexPolytope::centered_box(1, 1.0);
  const ConvexPolytope good = ConvexPolytope::axis_box(
      Eigen::Vector2d(-1.4, -1.0), Eigen::Vector2d(1.4, 1.0));
  ConvexPolytope current = good;
  for (int iter = 0; iter < 8; ++iter) {
    const ConvexPolytope next =
        prune_redundant(intersect(good, pre_set(sys, control, current)));
    CHECK(contained_in(next, current, 1e-8));
    current = next;
  }
}

TEST_CASE("sampled viability states admit a one-step safe control") {
  const LinearSystem sys = double_integrator_1d(0.1);
  const ConvexPolytope control = ConvexPolytope::centered_box(1, 1.0);
  const ConvexPolytope good = ConvexPolytope::axis_box(
      Eigen::Vector2d(-1.4, -1.0), Eigen::Vector2d(1.4, 1.0));
  const ConvexPolytope viability = viability_set(sys, control, good, 200);
  const ConvexPolytope pre = pre_set(sys, control, viability);

  std::mt19937 rng(31);
  std::uniform_real_distribution<double> px(-1.4, 1.4), pv(-1.0, 1.0);
  int sampled = 0;
  while (sampled < 500) {
    Eigen::VectorXd x(2);
    x << px(rng), pv(rng);
    if (!viability.contains(x, 1e-9)) continue;
    ++sampled;
    CHECK(pre.contains(x, 1e-7));  // one-step feasibility certificate
  }
}

TEST_CASE("terminal sets for the bundled six-agent scenario") {
  const Scenario scn = pssf_test::load_bundled_scenario("paper-sec4.scn");
  const TerminalSets sets = build_terminal_sets(scn);
  CHECK(sets.avoid_obstacle.size() == 7);
  CHECK(sets.viability.num_halfspaces() > 0);
  CHECK(sets.meta.viability_iterations >= 1);

  // The viability polytope stays inside the lifted eroded workspace.
  const ConvexPolytope eroded = pontryagin_difference(
      scn.workspace, negated_support(scn.agent_body));
  const ConvexPolytope lifted = lift_position_polytope(eroded, 4);
  CHECK(contained_in(sets.viability, lifted, 1e-7));

  // Every avoid ellipsoid contains its seed's vertices.
  const ConvexPolytope vel_box = [&] {
    Eigen::MatrixXd normals = Eigen::MatrixXd::Zero(4, 4);
    Eigen::VectorXd offsets(4);
    normals(0, 2) = 1;
    normals(1, 2) = -1;
    normals(2, 3) = 1;
    normals(3, 3) = -1;
    offsets.setConstant(scn.velocity_bound);
    return ConvexPolytope(normals, offsets);
  }();
  for (std::size_t j = 0; j < scn.obstacles.size(); ++j) {
    const ConvexPolytope seed2d =
        inflate_to_polygon(scn.obstacles[j].shape, scn.agent_body, 16);
    const ConvexPolytope seed =
        intersect(lift_position_polytope(seed2d, 4), vel_box);
    for (const auto& v : enumerate_vertices(seed)) {
      CHECK(sets.avoid_obstacle[j].quadratic_form(v) <= 1.0 + 1e-8);
    }
  }

  // Deterministic rebuild.
  const TerminalSets again = build_terminal_sets(scn);
  const std::uint64_t h = scenario_hash(scn);
  CHECK(serialize_terminal_sets(sets, h) == serialize_terminal_sets(again, h));
}

TEST_CASE("2-D double integrator: coarse-grid DP avoid states stay inside") {
  const Scenario scn = pssf_test::make_small_scenario();
  const LinearSystem& sys = scn.system;
  const double v_max = 1.0;
  const ConvexPolytope vel_box = [&] {
    Eigen::MatrixXd normals = Eigen::MatrixXd::Zero(4, 4);
    Eigen::VectorXd offsets(4);
    normals(0, 2) = 1;
    normals(1, 2) = -1;
    normals(2, 3) = 1;
    normals(3, 3) = -1;
    offsets.setConstant(v_max);
    return ConvexPolytope(normals, offsets);
  }();
  const double seed_radius = 0.25;  // obstacle 0.15 + body 0.1
  const ConvexPolytope seed2d =
      tangent_polygon(Ball(Eigen::Vector2d::Zero(), seed_radius), 16);
  const ConvexPolytope seed =
      intersect(lift_position_polytope(seed2d, 4), vel_box);
  const ConvexPolytope domain = intersect(
      lift_position_polytope(ConvexPolytope::centered_box(2, 1.0), 4),
      vel_box);
  const Ellipsoid ellipsoid =
      avoid_set_outer(sys, scn.control_set, seed, domain, 200);

  pssf_oracle::Grid grid;
  grid.lo = Eigen::VectorXd(4);
  grid.hi = Eigen::VectorXd(4);
  grid.lo << -1.0, -1.0, -v_max, -v_max;
  grid.hi << 1.0, 1.0, v_max, v_max;
  grid.cells = {17, 17, 17, 17};
  const auto controls = pssf_oracle::control_grid_2d(2.0, 3);
  const auto avoid = pssf_oracle::avoid_dp(
      grid, sys.A, sys.B, controls,
      [&](const Eigen::VectorXd& x) {
        return x.head(2).norm() <= seed_radius;
      },
      40);
  long marked = 0, escapes = 0;
  for (long s = 0; s < grid.total(); ++s) {
    if (!avoid[s]) continue;
    ++marked;
    if (ellipsoid.quadratic_form(grid.point(s)) > 1.0 + 1e-8) ++escapes;
  }
  CHECK(marked > 100);
  CHECK(escapes == 0);
}
