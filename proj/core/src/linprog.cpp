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

#include "pssf/linprog.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pssf {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-7;

// Tableau simplex over basis `basis` with Bland's rule. `tab` holds the
// constraint rows [W | rhs] with an appended objective row (reduced costs,
// negated objective value in the corner). Returns false on unboundedness.
bool run_simplex(Eigen::MatrixXd& tab, std::vector<int>& basis, int num_vars) {
  const int m = static_cast<int>(tab.rows()) - 1;
  const int rhs = static_cast<int>(tab.cols()) - 1;
  for (;;) {
    int enter = -1;
    for (int j = 0; j < num_vars; ++j) {
      if (tab(m, j) < -kCostTol) {
        enter = j;
        break;  // Bland: smallest index
      }
    }
    if (enter < 0) return true;  // optimal

    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      const double a = tab(i, enter);
      if (a > kPivotTol) {
        const double ratio = tab(i, rhs) / a;
        if (ratio < best_ratio - 1e-12 ||
            (std::abs(ratio - best_ratio) <= 1e-12 && leave >= 0 &&
             basis[i] < basis[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) return false;  // unbounded

    const double pivot = tab(leave, enter);
    tab.row(leave) /= pivot;
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      const double factor = tab(i, enter);
      if (factor != 0.0) tab.row(i) -= factor * tab.row(leave);
    }
    basis[leave] = enter;
  }
}

}  // namespace

LpResult solve_standard_lp(const Eigen::MatrixXd& E, const Eigen::VectorXd& f,
                           const Eigen::VectorXd& c) {
  const int m = static_cast<int>(E.rows());
  const int n = static_cast<int>(E.cols());
  if (f.size() != m || c.size() != n) {
    throw std::invalid_argument("solve_standard_lp: dimension mismatch");
  }

  // Row scaling for conditioning; keeps f >= 0 so artificials start feasible.
  Eigen::MatrixXd A = E;
  Eigen::VectorXd b = f;
  for (int i = 0; i < m; ++i) {
    double scale = std::max(A.row(i).cwiseAbs().maxCoeff(), std::abs(b(i)));
    if (scale > 0.0) {
      A.row(i) /= scale;
      b(i) /= scale;
    }
    if (b(i) < 0.0) {
      A.row(i) = -A.row(i);
      b(i) = -b(i);
    }
  }

  // Phase 1: minimize the sum of artificials.
  const int total = n + m;
  Eigen::MatrixXd tab = Eigen::MatrixXd::Zero(m + 1, total + 1);
  tab.block(0, 0, m, n) = A;
  tab.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
  tab.col(total).head(m) = b;

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;
  // Objective row: sum of artificials expressed in nonbasic variables.
  for (int j = 0; j < n; ++j) tab(m, j) = -A.col(j).sum();
  tab(m, total) = -b.sum();

  if (!run_simplex(tab, basis, total)) {
    throw std::runtime_error("solve_standard_lp: phase-1 unbounded");
  }
  if (-tab(m, total) > kFeasTol) {
    return {LpStatus::kInfeasible, 0.0, Eigen::VectorXd()};
  }

  // Pivot any lingering artificial (value ~0) out of the basis.
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) continue;
    int enter = -1;
    for (int j = 0; j < n; ++j) {
      if (std::abs(tab(i, j)) > kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) continue;  // redundant row; harmless to keep
    const double pivot = tab(i, enter);
    tab.row(i) /= pivot;
    for (int r = 0; r <= m; ++r) {
      if (r == i) continue;
      const double factor = tab(r, enter);
      if (factor != 0.0) tab.row(r) -= factor * tab.row(i);
    }
    basis[i] = enter;
  }

  // Phase 2 on the original columns.
  Eigen::MatrixXd tab2 = Eigen::MatrixXd::Zero(m + 1, n + 1);
  tab2.block(0, 0, m, n) = tab.block(0, 0, m, n);
  tab2.col(n).head(m) = tab.col(total).head(m);
  for (int j = 0; j < n; ++j) tab2(m, j) = c(j);
  tab2(m, n) = 0.0;
  // Reduce costs of basic columns to zero.
  for (int i = 0; i < m; ++i) {
    if (basis[i] >= n) continue;
    const double factor = tab2(m, basis[i]);
    if (factor != 0.0) tab2.row(m) -= factor * tab2.row(i);
  }

  if (!run_simplex(tab2, basis, n)) {
    return {LpStatus::kUnbounded, 0.0, Eigen::VectorXd()};
  }

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < m; ++i) {
    if (basis[i] < n) x(basis[i]) = tab2(i, n);
  }
  return {LpStatus::kOptimal, c.dot(x), x};
}

LpResult solve_support_dual(const Eigen::MatrixXd& G, const Eigen::VectorXd& d,
                            const Eigen::VectorXd& dir) {
  return solve_standard_lp(G.transpose(), dir, d);
}

}  // namespace pssf
