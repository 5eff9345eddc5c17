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

#ifndef PSSF_TESTS_HELPERS_HPP_
#define PSSF_TESTS_HELPERS_HPP_

#include <fstream>
#include <sstream>
#include <string>

#include "pssf/scenario.hpp"
#include "pssf/scenario_text.hpp"

namespace pssf_test {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline pssf::Scenario load_bundled_scenario(const std::string& name) {
  return pssf::parse_scenario(
      read_file(std::string(PSSF_SCENARIO_DIR) + "/" + name));
}

/// Small two-agent instance with one obstacle, kept cheap for unit tests.
inline pssf::Scenario make_small_scenario() {
  using namespace pssf;
  Scenario scn;
  scn.system = double_integrator_2d(0.1);
  scn.system.sigma_w = Eigen::Vector4d(1e-4, 1e-4, 0, 0).asDiagonal();
  scn.system.sigma_eta = Eigen::Vector4d(1e-4, 1e-4, 0, 0).asDiagonal();
  scn.controller = synthesize_controller(
      scn.system, Eigen::MatrixXd::Identity(4, 4),
      Eigen::MatrixXd::Identity(2, 2));
  scn.n_agents = 2;
  scn.agent_body = Ball(Eigen::Vector2d::Zero(), 0.1);
  scn.workspace = ConvexPolytope::centered_box(2, 1.5);
  scn.control_set = ConvexPolytope::centered_box(2, 2.0);
  Eigen::VectorXd s0 = Eigen::VectorXd::Zero(4);
  s0 << -1.0, 0.4, 0, 0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(4);
  s1 << -1.0, -0.4, 0, 0;
  scn.starts = {s0, s1};
  scn.targets = {Eigen::Vector2d(1.0, 0.4), Eigen::Vector2d(1.0, -0.4)};
  Obstacle o{Ball(Eigen::Vector2d::Zero(), 0.15), Eigen::Vector2d(0.0, 0.0),
             1e-4 * Eigen::Matrix2d::Identity()};
  scn.obstacles.push_back(o);
  scn.risk.alpha_obstacle = 0.01;
  scn.risk.beta_agent = 0.01;
  scn.risk.kappa_keepin = 0.01;
  scn.risk.delta_terminal = 0.1;
  scn.risk.horizon = 10;
  scn.velocity_bound = 1.0;
  scn.policy.kind = PolicyKind::kPotentialField;
  scn.validate();
  return scn;
}

}  // namespace pssf_test

#endif  // PSSF_TESTS_HELPERS_HPP_
