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

#ifndef PSSF_DYNAMICS_HPP_
#define PSSF_DYNAMICS_HPP_

#include <Eigen/Core>
#include <stdexcept>

namespace pssf {

struct RiccatiDivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RankDeficiencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// x+ = A x + B u + w, p = C x, y = x + eta, with w ~ N(0, sigma_w) and
/// eta ~ N(0, sigma_eta).
struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd sigma_w;
  Eigen::MatrixXd sigma_eta;
  double ts = 0.1;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
  int output_dim() const { return static_cast<int>(C.rows()); }
};

/// Planar double integrator, state (px, py, vx, vy), input acceleration.
/// Noise covariances are left zero for the caller to fill in.
LinearSystem double_integrator_2d(double ts);

/// u = K x + F r, with rho(A+BK) < 1 and C (I-(A+BK))^{-1} B F = I.
struct StabilizedController {
  Eigen::MatrixXd K;
  Eigen::MatrixXd F;
};

/// K from the discrete-time Riccati fixed point (u = Kx convention),
/// F as the pseudo-inverse of the closed-loop DC gain.
StabilizedController synthesize_controller(const LinearSystem& sys,
                                           const Eigen::MatrixXd& Q,
                                           const Eigen::MatrixXd& R);

double spectral_radius(const Eigen::MatrixXd& m);

struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// mean+ = A mean + B u, cov+ = A cov A' + sigma_w.
GaussianBelief propagate_belief(const LinearSystem& sys,
                                const GaussianBelief& belief,
                                const Eigen::VectorXd& control);

/// Position marginal (C mean, C cov C').
GaussianBelief position_belief(const LinearSystem& sys,
                               const GaussianBelief& belief);

/// Belief right after a measurement: mean = y, cov = sigma_eta.
GaussianBelief init_belief_from_measurement(const LinearSystem& sys,
                                            const Eigen::VectorXd& measurement);

}  // namespace pssf

#endif  // PSSF_DYNAMICS_HPP_
