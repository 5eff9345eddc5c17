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

// Test-only combinatorial QP oracle: enumerate candidate active sets in
// increasing cardinality, solve the equality-constrained KKT system, and
// accept the first primal-feasible, dual-nonnegative point. For a strictly
// convex QP any KKT point is the unique global optimum, so the first
// acceptance is the answer.

#ifndef PSSF_TESTS_ORACLES_ACTIVE_SET_ORACLE_HPP_
#define PSSF_TESTS_ORACLES_ACTIVE_SET_ORACLE_HPP_

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace pssf_oracle {

struct DenseQp {
  Eigen::MatrixXd H;
  Eigen::VectorXd f;
  Eigen::MatrixXd G;  // G x <= h, box constraints folded in as rows
  Eigen::VectorXd h;
};

inline std::optional<Eigen::VectorXd> active_set_solve(const DenseQp& qp,
                                                       int max_active) {
  const int n = static_cast<int>(qp.f.size());
  const int m = static_cast<int>(qp.h.size());

  std::vector<int> subset;
  const std::function<std::optional<Eigen::VectorXd>(int, int)> search =
      [&](int start, int remaining) -> std::optional<Eigen::VectorXd> {
    if (remaining == 0) {
      const int k = static_cast<int>(subset.size());
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
      kkt.topLeftCorner(n, n) = qp.H;
      for (int r = 0; r < k; ++r) {
        kkt.block(n + r, 0, 1, n) = qp.G.row(subset[r]);
        kkt.block(0, n + r, n, 1) = qp.G.row(subset[r]).transpose();
      }
      Eigen::VectorXd rhs(n + k);
      rhs.head(n) = -qp.f;
      for (int r = 0; r < k; ++r) rhs(n + r) = qp.h(subset[r]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
      if (!lu.isInvertible()) return std::nullopt;
      const Eigen::VectorXd sol = lu.solve(rhs);
      const Eigen::VectorXd x = sol.head(n);
      for (int r = 0; r < k; ++r) {
        if (sol(n + r) < -1e-9) return std::nullopt;  // wrong dual sign
      }
      if (((qp.G * x - qp.h).array() <= 1e-8).all()) return x;
      return std::nullopt;
    }
    for (int i = start; i <= m - remaining; ++i) {
      subset.push_back(i);
      const auto res = search(i + 1, remaining - 1);
      subset.pop_back();
      if (res.has_value()) return res;
    }
    return std::nullopt;
  };

  for (int cardinality = 0; cardinality <= max_active; ++cardinality) {
    const auto res = search(0, cardinality);
    if (res.has_value()) return res;
  }
  return std::nullopt;
}

}  // namespace pssf_oracle

#endif  // PSSF_TESTS_ORACLES_ACTIVE_SET_ORACLE_HPP_
