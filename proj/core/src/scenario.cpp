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

#include "pssf/scenario.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <cstring>

namespace pssf {

double Obstacle::covering_radius(const ConvexSet& agent_body) const {
  // Smallest origin-centered ball containing shape (+) (-agent): scan unit
  // directions; exact for balls, tight to the sampling for polytopes.
  const int d = mean_center.size();
  if (d == 2) {
    double radius = 0.0;
    constexpr int kDirs = 64;
    for (int i = 0; i < kDirs; ++i) {
      const double theta = 2.0 * M_PI * i / kDirs;
      Eigen::VectorXd dir(2);
      dir << std::cos(theta), std::sin(theta);
      radius = std::max(radius,
                        support(shape, dir) + support(agent_body, -dir));
    }
    return radius;
  }
  double radius = 0.0;
  for (int k = 0; k < d; ++k) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd dir = Eigen::VectorXd::Zero(d);
      dir(k) = sign;
      radius = std::max(radius,
                        support(shape, dir) + support(agent_body, -dir));
    }
  }
  return radius;
}

void Scenario::validate() const {
  const int n = system.state_dim();
  const int d = system.output_dim();
  if (d >= n) throw std::invalid_argument("system: output_dim must be < state_dim");
  risk.validate();

  const auto check_psd = [](const Eigen::MatrixXd& m, const char* name) {
    if (m.rows() != m.cols()) {
      throw std::invalid_argument(std::string(name) + ": not square");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        0.5 * (m + m.transpose().eval()));
    if (eig.eigenvalues().minCoeff() <
        -1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument(std::string(name) + ": not PSD");
    }
  };
  check_psd(system.sigma_w, "sigma_w");
  check_psd(system.sigma_eta, "sigma_eta");

  if (n_agents < 1) throw std::invalid_argument("agents: count must be >= 1");
  if (static_cast<int>(starts.size()) != n_agents ||
      static_cast<int>(targets.size()) != n_agents) {
    throw std::invalid_argument("agents: starts/targets count mismatch");
  }
  for (const auto& s : starts) {
    if (s.size() != n) throw std::invalid_argument("agents: start dimension");
  }
  for (const auto& t : targets) {
    if (t.size() != d) throw std::invalid_argument("agents: target dimension");
  }

  if (!is_bounded(control_set)) {
    throw std::invalid_argument("control_set: must be bounded");
  }
  if (!control_set.contains(Eigen::VectorXd::Zero(control_set.dim()))) {
    throw std::invalid_argument("control_set: must contain the origin");
  }
  if (!is_bounded(workspace)) {
    throw std::invalid_argument("workspace: must be bounded");
  }

  // Targets must sit inside the eroded workspace.
  const ConvexPolytope eroded =
      pontryagin_difference(workspace, negated_support(agent_body));
  for (int i = 0; i < n_agents; ++i) {
    if (!eroded.contains(targets[i], 1e-9)) {
      throw std::invalid_argument("agents: target " + std::to_string(i) +
                                  " outside workspace (-) agent body");
    }
  }

  // Feasible start: pairwise separation above twice the body support.
  double body_extent = 0.0;
  {
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(d);
    for (int k = 0; k < d; ++k) {
      for (double sign : {1.0, -1.0}) {
        dir.setZero();
        dir(k) = sign;
        body_extent = std::max(body_extent, support(agent_body, dir));
      }
    }
  }
  for (int i = 0; i < n_agents; ++i) {
    for (int j = i + 1; j < n_agents; ++j) {
      const double dist =
          (system.C * starts[i] - system.C * starts[j]).norm();
      if (dist <= 2.0 * body_extent) {
        throw std::invalid_argument("agents: starts " + std::to_string(i) +
                                    " and " + std::to_string(j) +
                                    " closer than twice the body extent");
      }
    }
  }

  for (std::size_t j = 0; j < obstacles.size(); ++j) {
    const auto& o = obstacles[j];
    if (o.mean_center.size() != d) {
      throw std::invalid_argument("obstacles: center dimension at index " +
                                  std::to_string(j));
    }
    check_psd(o.center_cov, "obstacle center covariance");
  }

  if (deviation_weight < 0.0) {
    throw std::invalid_argument("weights: lambda must be nonnegative");
  }
  if (velocity_bound <= 0.0) {
    throw std::invalid_argument("terminal: velocity bound must be positive");
  }
  if (mpc_input_penalty <= 0.0) {
    throw std::invalid_argument("weights: input penalty must be positive");
  }
}

namespace {

void hash_bytes(std::uint64_t& h, const void* data, std::size_t len) {
  const unsigned char* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
}

void hash_double(std::uint64_t& h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  hash_bytes(h, &bits, sizeof(bits));
}

void hash_matrix(std::uint64_t& h, const Eigen::MatrixXd& m) {
  const std::int64_t r = m.rows(), c = m.cols();
  hash_bytes(h, &r, sizeof(r));
  hash_bytes(h, &c, sizeof(c));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) hash_double(h, m(i, j));
  }
}

void hash_set(std::uint64_t& h, const ConvexSet& s) {
  if (const auto* b = std::get_if<Ball>(&s)) {
    hash_double(h, 1.0);
    hash_matrix(h, b->center);
    hash_double(h, b->radius);
  } else if (const auto* e = std::get_if<Ellipsoid>(&s)) {
    hash_double(h, 2.0);
    hash_matrix(h, e->center());
    hash_matrix(h, e->shape());
  } else {
    const auto& p = std::get<ConvexPolytope>(s);
    hash_double(h, 3.0);
    hash_matrix(h, p.normals());
    hash_matrix(h, p.offsets());
  }
}

}  // namespace

std::uint64_t scenario_hash(const Scenario& s) {
  std::uint64_t h = 1469598103934665603ULL;
  hash_matrix(h, s.system.A);
  hash_matrix(h, s.system.B);
  hash_matrix(h, s.system.C);
  hash_matrix(h, s.system.sigma_w);
  hash_matrix(h, s.system.sigma_eta);
  hash_double(h, s.system.ts);
  const std::int64_t n = s.n_agents;
  hash_bytes(h, &n, sizeof(n));
  hash_set(h, s.agent_body);
  for (const auto& o : s.obstacles) {
    hash_set(h, o.shape);
    hash_matrix(h, o.mean_center);
    hash_matrix(h, o.center_cov);
  }
  hash_matrix(h, s.workspace.normals());
  hash_matrix(h, s.workspace.offsets());
  hash_matrix(h, s.control_set.normals());
  hash_matrix(h, s.control_set.offsets());
  for (const auto& x : s.starts) hash_matrix(h, x);
  for (const auto& q : s.targets) hash_matrix(h, q);
  hash_double(h, s.risk.alpha_obstacle);
  hash_double(h, s.risk.beta_agent);
  hash_double(h, s.risk.kappa_keepin);
  hash_double(h, s.risk.delta_terminal);
  const std::int64_t T = s.risk.horizon;
  hash_bytes(h, &T, sizeof(T));
  hash_double(h, s.deviation_weight);
  hash_double(h, s.velocity_bound);
  return h;
}

double Plan::dynamics_residual(const LinearSystem& sys) const {
  double worst = 0.0;
  for (int i = 0; i < n_agents(); ++i) {
    for (int k = 0; k < horizon(); ++k) {
      const Eigen::VectorXd predicted =
          sys.A * states[i].col(k) + sys.B * controls[i].col(k);
      worst = std::max(
          worst, (states[i].col(k + 1) - predicted).lpNorm<Eigen::Infinity>());
    }
  }
  return worst;
}

}  // namespace pssf
