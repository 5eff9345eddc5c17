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

#include "pssf/dynamics.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace pssf {

LinearSystem double_integrator_2d(double ts) {
  if (ts <= 0.0) throw std::invalid_argument("double_integrator_2d: ts <= 0");
  LinearSystem sys;
  sys.ts = ts;
  sys.A = Eigen::MatrixXd::Identity(4, 4);
  sys.A(0, 2) = ts;
  sys.A(1, 3) = ts;
  sys.B = Eigen::MatrixXd::Zero(4, 2);
  sys.B(0, 0) = 0.5 * ts * ts;
  sys.B(1, 1) = 0.5 * ts * ts;
  sys.B(2, 0) = ts;
  sys.B(3, 1) = ts;
  sys.C = Eigen::MatrixXd::Zero(2, 4);
  sys.C(0, 0) = 1.0;
  sys.C(1, 1) = 1.0;
  sys.sigma_w = Eigen::MatrixXd::Zero(4, 4);
  sys.sigma_eta = Eigen::MatrixXd::Zero(4, 4);
  return sys;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

StabilizedController synthesize_controller(const LinearSystem& sys,
                                           const Eigen::MatrixXd& Q,
                                           const Eigen::MatrixXd& R) {
  const int n = sys.state_dim();
  const Eigen::MatrixXd& A = sys.A;
  const Eigen::MatrixXd& B = sys.B;

  Eigen::MatrixXd P = Q;
  constexpr int kMaxIters = 100000;
  constexpr double kTol = 1e-10;
  bool converged = false;
  for (int i = 0; i < kMaxIters; ++i) {
    const Eigen::MatrixXd BtPB = R + B.transpose() * P * B;
    const Eigen::MatrixXd gain = BtPB.ldlt().solve(B.transpose() * P * A);
    Eigen::MatrixXd next =
        Q + A.transpose() * P * A - A.transpose() * P * B * gain;
    next = 0.5 * (next + next.transpose().eval());
    const double residual = (next - P).cwiseAbs().maxCoeff() /
                            std::max(1.0, P.cwiseAbs().maxCoeff());
    P = next;
    if (residual <= kTol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw RiccatiDivergenceError("synthesize_controller: Riccati iteration "
                                 "did not converge");
  }

  StabilizedController ctrl;
  ctrl.K = -(R + B.transpose() * P * B)
                .ldlt()
                .solve(B.transpose() * P * A);
  const Eigen::MatrixXd closed = A + B * ctrl.K;
  if (spectral_radius(closed) > 1.0 - 1e-6) {
    throw RiccatiDivergenceError(
        "synthesize_controller: closed loop not strictly stable");
  }

  const Eigen::MatrixXd dc =
      sys.C * (Eigen::MatrixXd::Identity(n, n) - closed).lu().solve(B);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      dc, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues().minCoeff();
  if (smin < 1e-10 || svd.rank() < sys.output_dim()) {
    throw RankDeficiencyError("synthesize_controller: DC gain rank deficient");
  }
  ctrl.F = svd.solve(Eigen::MatrixXd::Identity(sys.output_dim(),
                                               sys.output_dim()));

  const Eigen::MatrixXd identity_check = dc * ctrl.F;
  const double err = (identity_check -
                      Eigen::MatrixXd::Identity(sys.output_dim(),
                                                sys.output_dim()))
                         .cwiseAbs()
                         .maxCoeff();
  if (err > 1e-8) {
    throw RankDeficiencyError(
        "synthesize_controller: unit DC gain not achievable");
  }
  return ctrl;
}

GaussianBelief propagate_belief(const LinearSystem& sys,
                                const GaussianBelief& belief,
                                const Eigen::VectorXd& control) {
  if (belief.mean.size() != sys.state_dim() ||
      control.size() != sys.input_dim()) {
    throw std::invalid_argument("propagate_belief: dimension mismatch");
  }
  GaussianBelief next;
  next.mean = sys.A * belief.mean + sys.B * control;
  next.cov = sys.A * belief.cov * sys.A.transpose() + sys.sigma_w;
  next.cov = 0.5 * (next.cov + next.cov.transpose().eval());
  return next;
}

GaussianBelief position_belief(const LinearSystem& sys,
                               const GaussianBelief& belief) {
  return {sys.C * belief.mean, sys.C * belief.cov * sys.C.transpose()};
}

GaussianBelief init_belief_from_measurement(
    const LinearSystem& sys, const Eigen::VectorXd& measurement) {
  if (measurement.size() != sys.state_dim()) {
    throw std::invalid_argument(
        "init_belief_from_measurement: dimension mismatch");
  }
  return {measurement, sys.sigma_eta};
}

}  // namespace pssf
