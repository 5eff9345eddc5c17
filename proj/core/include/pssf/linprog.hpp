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

#ifndef PSSF_LINPROG_HPP_
#define PSSF_LINPROG_HPP_

#include <Eigen/Core>

namespace pssf {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  Eigen::VectorXd x;
};

/// Dense two-phase simplex for  min c'x  s.t.  Ex = f, x >= 0.
///
/// Bland's rule throughout, so the iteration cannot cycle. Sized for the
/// small systems produced by the set calculus (tens of rows, up to a few
/// thousand columns).
LpResult solve_standard_lp(const Eigen::MatrixXd& E, const Eigen::VectorXd& f,
                           const Eigen::VectorXd& c);

/// min d'y  s.t.  G'y = dir, y >= 0  — the dual of a polytope support
/// problem max dir'x s.t. Gx <= d. Exposed for reuse by the set kernel.
LpResult solve_support_dual(const Eigen::MatrixXd& G, const Eigen::VectorXd& d,
                            const Eigen::VectorXd& dir);

}  // namespace pssf

#endif  // PSSF_LINPROG_HPP_
