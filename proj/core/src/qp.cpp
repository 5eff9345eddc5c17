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

#include "pssf/qp.hpp"

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <sstream>

namespace pssf {

namespace {

constexpr double kZeroRowTol = 1e-14;
constexpr double kZeroRowFeasTol = 1e-9;

const char* kind_name(ConstraintKind kind) {
  static const char* kNames[] = {"obstacle", "agent", "keepin",
                                 "terminal-obstacle", "terminal-agent",
                                 "terminal-viability", "control-set"};
  return kNames[static_cast<int>(kind)];
}

// Moves the merged rows into the problem, dropping rows without control
// influence (checked for constant feasibility) and rows that no point of
// the control box can violate.
void install_rows(QpProblem& qp, const LinearConstraintSet& merged) {
  const Eigen::VectorXd center = 0.5 * (qp.lower_bound + qp.upper_bound);
  const Eigen::VectorXd half = 0.5 * (qp.upper_bound - qp.lower_bound);

  std::vector<int> keep;
  keep.reserve(merged.rows());
  for (int r = 0; r < merged.rows(); ++r) {
    const double row_max = merged.coeffs.row(r).cwiseAbs().maxCoeff();
    if (row_max <= kZeroRowTol) {
      if (merged.upper(r) < -kZeroRowFeasTol && !qp.infeasible_at_assembly) {
        qp.infeasible_at_assembly = true;
        const RowInfo& info = merged.info[r];
        std::ostringstream note;
        note << "constant " << kind_name(info.kind) << " row violated (agent "
             << info.agent << ", step " << info.step << ", counterpart "
             << info.counterpart << ", residual " << merged.upper(r) << ")";
        qp.infeasibility_note = note.str();
      }
      continue;
    }
    // Largest value the row can take over the box.
    const double worst = merged.coeffs.row(r).dot(center) +
                         merged.coeffs.row(r).cwiseAbs().dot(half);
    if (worst <= merged.upper(r)) {
      ++qp.screened_rows;
      continue;
    }
    keep.push_back(r);
  }

  qp.constraints.resize(keep.size(), merged.coeffs.cols());
  qp.upper.resize(keep.size());
  qp.row_info.reserve(keep.size());
  for (int i = 0; i < static_cast<int>(keep.size()); ++i) {
    qp.constraints.row(i) = merged.coeffs.row(keep[i]);
    qp.upper(i) = merged.upper(keep[i]);
    qp.row_info.push_back(merged.info[keep[i]]);
  }
}

void install_control_box(QpProblem& qp, const Scenario& scenario) {
  const int m = scenario.system.input_dim();
  Eigen::VectorXd lo(m), hi(m);
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < m; ++j) {
    dir.setZero();
    dir(j) = 1.0;
    hi(j) = support(scenario.control_set, dir);
    dir(j) = -1.0;
    lo(j) = -support(scenario.control_set, dir);
  }
  const int size = qp.map.size();
  qp.lower_bound.resize(size);
  qp.upper_bound.resize(size);
  for (int a = 0; a < qp.map.n_agents; ++a) {
    for (int s = 0; s < qp.map.horizon; ++s) {
      for (int j = 0; j < m; ++j) {
        qp.lower_bound(qp.map.column(a, s, j)) = lo(j);
        qp.upper_bound(qp.map.column(a, s, j)) = hi(j);
      }
    }
  }
}

// Non-axis-aligned control-set halfspaces replicated per (agent, step).
LinearConstraintSet control_set_rows(const Scenario& scenario,
                                     const VariableMap& map) {
  const int m = scenario.system.input_dim();
  std::vector<int> general_rows;
  for (int r = 0; r < scenario.control_set.num_halfspaces(); ++r) {
    const Eigen::RowVectorXd normal = scenario.control_set.normals().row(r);
    int nonzero = 0;
    for (int j = 0; j < m; ++j) {
      if (std::abs(normal(j)) > 0.0) ++nonzero;
    }
    if (nonzero > 1) general_rows.push_back(r);
  }
  LinearConstraintSet set;
  set.map = map;
  const int total = static_cast<int>(general_rows.size()) * map.n_agents *
                    map.horizon;
  set.coeffs = Eigen::MatrixXd::Zero(total, map.size());
  set.upper = Eigen::VectorXd::Zero(total);
  set.info.reserve(total);
  int row = 0;
  for (int a = 0; a < map.n_agents; ++a) {
    for (int s = 0; s < map.horizon; ++s) {
      for (int r : general_rows) {
        set.coeffs.block(row, map.column(a, s, 0), 1, m) =
            scenario.control_set.normals().row(r);
        set.upper(row) = scenario.control_set.offsets()(r);
        set.info.push_back({a, s, ConstraintKind::kControlSet, r});
        ++row;
      }
    }
  }
  return set;
}

}  // namespace

QpProblem assemble(const Plan& plan, const LinearConstraintSet& p1,
                   const LinearConstraintSet& p2, const Scenario& scenario) {
  if (p2.rows() > 0 && p1.map.size() != p2.map.size()) {
    throw std::invalid_argument("assemble: constraint sets disagree on layout");
  }
  QpProblem qp;
  qp.map = p1.map;
  const int size = qp.map.size();
  const double lambda = scenario.deviation_weight;

  qp.hessian = 2.0 * lambda * Eigen::MatrixXd::Identity(size, size);
  qp.linear.resize(size);
  for (int a = 0; a < qp.map.n_agents; ++a) {
    for (int s = 0; s < qp.map.horizon; ++s) {
      qp.linear.segment(qp.map.column(a, s, 0), qp.map.input_dim) =
          -2.0 * lambda * plan.controls[a].col(s);
    }
  }

  install_control_box(qp, scenario);
  LinearConstraintSet merged = concatenate(p1, p2);
  merged = concatenate(merged, control_set_rows(scenario, qp.map));
  install_rows(qp, merged);
  return qp;
}

QpProblem assemble_pure_mpc(const Plan& plan, const LinearConstraintSet& p1,
                            const LinearConstraintSet& p2,
                            const PredictionModel& model,
                            const Scenario& scenario) {
  QpProblem qp;
  qp.map = p1.map;
  const int size = qp.map.size();
  const int m = qp.map.input_dim;
  const int T = qp.map.horizon;
  const int d = scenario.system.output_dim();
  const double lambda = scenario.deviation_weight;
  const double epsilon = scenario.mpc_input_penalty;

  qp.hessian = Eigen::MatrixXd::Zero(size, size);
  qp.linear = Eigen::VectorXd::Zero(size);
  const int block = T * m;
  for (int a = 0; a < qp.map.n_agents; ++a) {
    Eigen::MatrixXd h_block =
        2.0 * epsilon * Eigen::MatrixXd::Identity(block, block);
    Eigen::VectorXd f_block = Eigen::VectorXd::Zero(block);
    for (int k = 1; k <= T; ++k) {
      Eigen::MatrixXd pos_map = Eigen::MatrixXd::Zero(d, block);
      for (int s = 0; s < k; ++s) {
        pos_map.block(0, s * m, d, m) = model.pos_maps[k][s];
      }
      const Eigen::VectorXd base =
          scenario.system.C * (model.a_pow[k] * plan.states[a].col(0)) -
          scenario.targets[a];
      h_block += 2.0 * lambda * pos_map.transpose() * pos_map;
      f_block += 2.0 * lambda * pos_map.transpose() * base;
    }
    const int off = qp.map.agent_offset(a);
    qp.hessian.block(off, off, block, block) = h_block;
    qp.linear.segment(off, block) = f_block;
  }

  install_control_box(qp, scenario);
  LinearConstraintSet merged = concatenate(p1, p2);
  merged = concatenate(merged, control_set_rows(scenario, qp.map));
  install_rows(qp, merged);
  return qp;
}

namespace {

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
  double eps_primal = 0.0;
  double eps_dual = 0.0;
};

Residuals compute_residuals(const Eigen::MatrixXd& H, const Eigen::VectorXd& f,
                            const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& z, const Eigen::VectorXd& y,
                            const QpSettings& settings) {
  const Eigen::VectorXd Ax = A * x;
  const Eigen::VectorXd Hx = H * x;
  const Eigen::VectorXd Aty = A.transpose() * y;
  Residuals r;
  r.primal = (Ax - z).lpNorm<Eigen::Infinity>();
  r.dual = (Hx + f + Aty).lpNorm<Eigen::Infinity>();
  r.eps_primal = settings.eps_abs +
                 settings.eps_rel * std::max(Ax.lpNorm<Eigen::Infinity>(),
                                             z.lpNorm<Eigen::Infinity>());
  r.eps_dual =
      settings.eps_abs +
      settings.eps_rel * std::max({Hx.lpNorm<Eigen::Infinity>(),
                                   Aty.lpNorm<Eigen::Infinity>(),
                                   f.lpNorm<Eigen::Infinity>()});
  return r;
}

struct KktResiduals {
  double stationarity = 0.0;
  double primal = 0.0;
  double complementarity = 0.0;
};

KktResiduals kkt_residuals(const Eigen::MatrixXd& H, const Eigen::VectorXd& f,
                           const Eigen::MatrixXd& A, const Eigen::VectorXd& lo,
                           const Eigen::VectorXd& up, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& y) {
  KktResiduals r;
  r.stationarity =
      (H * x + f + A.transpose() * y).lpNorm<Eigen::Infinity>();
  const Eigen::VectorXd Ax = A * x;
  for (int i = 0; i < Ax.size(); ++i) {
    r.primal = std::max({r.primal, Ax(i) - up(i), lo(i) - Ax(i)});
    if (y(i) > 0.0) {
      r.complementarity = std::max(r.complementarity, y(i) * (up(i) - Ax(i)));
    } else if (y(i) < 0.0) {
      r.complementarity = std::max(r.complementarity, -y(i) * (Ax(i) - lo(i)));
    }
  }
  r.primal = std::max(r.primal, 0.0);
  return r;
}

// Equality-constrained refinement on the active rows; adopted only when it
// improves every KKT residual class.
void polish(const Eigen::MatrixXd& H, const Eigen::VectorXd& f,
            const Eigen::MatrixXd& A, const Eigen::VectorXd& lo,
            const Eigen::VectorXd& up, Eigen::VectorXd& x,
            Eigen::VectorXd& y) {
  const int n = static_cast<int>(x.size());
  const Eigen::VectorXd Ax = A * x;
  std::vector<int> active;
  std::vector<double> target;
  std::vector<int> side;  // +1 upper, -1 lower
  for (int i = 0; i < Ax.size(); ++i) {
    const double tol = 1e-7 * std::max(1.0, std::abs(up(i)));
    if (up(i) - Ax(i) < tol || y(i) > 1e-9) {
      active.push_back(i);
      target.push_back(up(i));
      side.push_back(+1);
    } else if (Ax(i) - lo(i) < tol || y(i) < -1e-9) {
      active.push_back(i);
      target.push_back(lo(i));
      side.push_back(-1);
    }
  }
  const int k = static_cast<int>(active.size());
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
  kkt.topLeftCorner(n, n) = H;
  for (int r = 0; r < k; ++r) {
    kkt.block(n + r, 0, 1, n) = A.row(active[r]);
    kkt.block(0, n + r, n, 1) = A.row(active[r]).transpose();
  }
  // Light Tikhonov term on the multiplier block for redundant active sets.
  for (int r = 0; r < k; ++r) kkt(n + r, n + r) = -1e-12;
  Eigen::VectorXd rhs(n + k);
  rhs.head(n) = -f;
  for (int r = 0; r < k; ++r) rhs(n + r) = target[r];

  const Eigen::VectorXd sol = kkt.ldlt().solve(rhs);
  if (!sol.allFinite()) return;
  Eigen::VectorXd x_new = sol.head(n);
  Eigen::VectorXd y_new = Eigen::VectorXd::Zero(Ax.size());
  bool sign_ok = true;
  for (int r = 0; r < k; ++r) {
    double mult = sol(n + r);
    if (side[r] > 0 && mult < -1e-7) sign_ok = false;
    if (side[r] < 0 && mult > 1e-7) sign_ok = false;
    y_new(active[r]) = mult;
  }
  if (!sign_ok) return;
  // Clip tiny wrong-signed multipliers introduced by regularization.
  for (int r = 0; r < k; ++r) {
    if (side[r] > 0) y_new(active[r]) = std::max(y_new(active[r]), 0.0);
    if (side[r] < 0) y_new(active[r]) = std::min(y_new(active[r]), 0.0);
  }

  const KktResiduals before = kkt_residuals(H, f, A, lo, up, x, y);
  const KktResiduals after = kkt_residuals(H, f, A, lo, up, x_new, y_new);
  if (after.stationarity <= std::max(before.stationarity, 1e-10) &&
      after.primal <= std::max(before.primal, 1e-10) &&
      after.complementarity <= std::max(before.complementarity, 1e-10)) {
    x = std::move(x_new);
    y = std::move(y_new);
  }
}

}  // namespace

QpSolution solve(const QpProblem& problem, const QpSettings& settings,
                 const std::optional<WarmStart>& warm_start) {
  const auto t_start = std::chrono::steady_clock::now();
  const auto elapsed = [&t_start] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };

  QpSolution out;
  if (problem.infeasible_at_assembly) {
    out.status = QpStatus::kInfeasible;
    out.solve_seconds = elapsed();
    return out;
  }

  const int n = problem.num_vars();
  const int rows = problem.num_rows();
  const Eigen::MatrixXd& H = problem.hessian;
  const Eigen::VectorXd& f = problem.linear;

  {
    const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(H);
    if (asym > 1e-9 ||
        eig.eigenvalues().minCoeff() <
            -1e-9 * std::max(1.0, H.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("solve: hessian must be symmetric PSD");
    }
  }

  // Stacked two-sided form: rows get (-inf, h], box rows get [lb, ub].
  constexpr double kNegInf = -1e30;
  const int total = rows + n;
  Eigen::MatrixXd A(total, n);
  Eigen::VectorXd lo(total), up(total);
  if (rows > 0) A.topRows(rows) = problem.constraints;
  A.bottomRows(n) = Eigen::MatrixXd::Identity(n, n);
  for (int i = 0; i < rows; ++i) {
    lo(i) = kNegInf;
    up(i) = problem.upper(i);
  }
  lo.tail(n) = problem.lower_bound;
  up.tail(n) = problem.upper_bound;

  const auto finish_optimal = [&](const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y, int iters) {
    QpSolution sol;
    sol.status = QpStatus::kOptimal;
    sol.primal = x;
    sol.iterations = iters;
    const KktResiduals kkt = kkt_residuals(H, f, A, lo, up, x, y);
    sol.stationarity_residual = kkt.stationarity;
    sol.primal_residual = kkt.primal;
    sol.complementarity_residual = kkt.complementarity;
    sol.dual = rows > 0 ? y.head(rows).cwiseMax(0.0).eval() : Eigen::VectorXd();
    sol.solve_seconds = elapsed();
    return sol;
  };

  // Fast path: the unconstrained minimizer, when strictly feasible.
  {
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() == Eigen::Success) {
      const Eigen::VectorXd x0 = llt.solve(-f);
      const Eigen::VectorXd Ax0 = A * x0;
      if (((Ax0 - up).array() <= 1e-9).all() &&
          ((lo - Ax0).array() <= 1e-9).all()) {
        return finish_optimal(x0, Eigen::VectorXd::Zero(total), 0);
      }
    }
  }

  double rho = settings.rho;
  const double sigma = settings.sigma;
  const double alpha = settings.over_relaxation;

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(total);
  if (warm_start.has_value() && warm_start->primal.size() == n) {
    x = warm_start->primal;
    if (warm_start->dual.size() == total) y = warm_start->dual;
  }
  Eigen::VectorXd z = (A * x).cwiseMax(lo).cwiseMin(up);

  Eigen::LDLT<Eigen::MatrixXd> kkt_factor;
  const auto refactor = [&] {
    Eigen::MatrixXd kkt = H + sigma * Eigen::MatrixXd::Identity(n, n) +
                          rho * (A.transpose() * A);
    kkt_factor.compute(kkt);
  };
  refactor();

  Eigen::VectorXd y_prev_check = y;
  int iter = 0;
  for (iter = 1; iter <= settings.max_iterations; ++iter) {
    const Eigen::VectorXd rhs =
        sigma * x - f + A.transpose() * (rho * z - y);
    const Eigen::VectorXd x_tilde = kkt_factor.solve(rhs);
    const Eigen::VectorXd z_tilde = A * x_tilde;
    const Eigen::VectorXd x_next = alpha * x_tilde + (1.0 - alpha) * x;
    const Eigen::VectorXd z_mix = alpha * z_tilde + (1.0 - alpha) * z;
    const Eigen::VectorXd z_next = (z_mix + y / rho).cwiseMax(lo).cwiseMin(up);
    y = y + rho * (z_mix - z_next);
    x = x_next;
    z = z_next;

    if (iter % 10 == 0 || iter == settings.max_iterations) {
      const Residuals res = compute_residuals(H, f, A, x, z, y, settings);
      if (res.primal <= res.eps_primal && res.dual <= res.eps_dual) break;

      // Primal infeasibility certificate from the dual increment.
      Eigen::VectorXd dy = y - y_prev_check;
      for (int i = 0; i < total; ++i) {
        if (lo(i) <= kNegInf && dy(i) < 0.0) dy(i) = 0.0;
      }
      const double dy_norm = dy.lpNorm<Eigen::Infinity>();
      if (dy_norm > 1e-12) {
        const double aty = (A.transpose() * dy).lpNorm<Eigen::Infinity>();
        double gap = 0.0;
        for (int i = 0; i < total; ++i) {
          if (dy(i) > 0.0) {
            gap += up(i) * dy(i);
          } else if (dy(i) < 0.0) {
            gap += lo(i) * dy(i);
          }
        }
        if (aty <= 1e-8 * dy_norm && gap < -1e-10 * dy_norm) {
          out.status = QpStatus::kInfeasible;
          out.iterations = iter;
          out.solve_seconds = elapsed();
          return out;
        }
      }
      y_prev_check = y;

      if (settings.adaptive_rho && iter % 50 == 0) {
        const double ratio = (res.primal / std::max(res.eps_primal, 1e-30)) /
                             std::max(res.dual / std::max(res.eps_dual, 1e-30),
                                      1e-30);
        const double scale = std::sqrt(ratio);
        if (scale > 5.0 || scale < 0.2) {
          rho = std::min(std::max(rho * scale, 1e-3), 1e3);
          refactor();
        }
      }
    }
  }

  if (iter > settings.max_iterations) {
    const Residuals res = compute_residuals(H, f, A, x, z, y, settings);
    if (res.primal > res.eps_primal || res.dual > res.eps_dual) {
      out.status = QpStatus::kMaxIterations;
      out.iterations = settings.max_iterations;
      out.primal = x;
      out.solve_seconds = elapsed();
      return out;
    }
    iter = settings.max_iterations;
  }

  polish(H, f, A, lo, up, x, y);
  return finish_optimal(x, y, iter);
}

std::vector<Eigen::VectorXd> extract_first_controls(const QpSolution& solution,
                                                    const VariableMap& map) {
  if (solution.status != QpStatus::kOptimal) {
    throw std::logic_error("extract_first_controls: solution not optimal");
  }
  std::vector<Eigen::VectorXd> firsts;
  firsts.reserve(map.n_agents);
  for (int a = 0; a < map.n_agents; ++a) {
    firsts.push_back(
        solution.primal.segment(map.column(a, 0, 0), map.input_dim));
  }
  return firsts;
}

Eigen::MatrixXd remaining_controls(const QpSolution& solution,
                                   const VariableMap& map, int agent) {
  if (solution.status != QpStatus::kOptimal) {
    throw std::logic_error("remaining_controls: solution not optimal");
  }
  Eigen::MatrixXd rest(map.input_dim, map.horizon - 1);
  for (int s = 1; s < map.horizon; ++s) {
    rest.col(s - 1) =
        solution.primal.segment(map.column(agent, s, 0), map.input_dim);
  }
  return rest;
}

std::string dump_qp(const QpProblem& problem) {
  std::ostringstream out;
  out.precision(17);
  const auto write_dense = [&out](const char* name, const Eigen::MatrixXd& m) {
    out << "%%MatrixMarket matrix array real general\n% " << name << "\n"
        << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) out << m(i, j) << "\n";
    }
  };
  write_dense("hessian", problem.hessian);
  write_dense("linear", problem.linear);
  write_dense("constraints", problem.constraints);
  write_dense("upper", problem.upper);
  write_dense("lower_bound", problem.lower_bound);
  write_dense("upper_bound", problem.upper_bound);
  return out.str();
}

}  // namespace pssf
