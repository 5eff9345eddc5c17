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

#include "pssf/geometry.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pssf/linprog.hpp"

namespace pssf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Finite support value or +/-inf; avoids exceptions on hot paths.
double support_lp(const Eigen::MatrixXd& normals, const Eigen::VectorXd& offsets,
                  const Eigen::VectorXd& dir) {
  const LpResult res = solve_support_dual(normals, offsets, dir);
  switch (res.status) {
    case LpStatus::kOptimal:
      return res.value;
    case LpStatus::kInfeasible:
      return kInf;  // primal unbounded in this direction
    case LpStatus::kUnbounded:
      return -kInf;  // primal empty
  }
  return kInf;
}

std::vector<Eigen::VectorXd> dedup_points(std::vector<Eigen::VectorXd> pts,
                                          double tol) {
  std::vector<Eigen::VectorXd> out;
  for (auto& p : pts) {
    bool seen = false;
    for (const auto& q : out) {
      if ((p - q).lpNorm<Eigen::Infinity>() <= tol) {
        seen = true;
        break;
      }
    }
    if (!seen) out.push_back(std::move(p));
  }
  return out;
}

// Monotone chain; returns extreme points in ccw order, collinear dropped.
std::vector<Eigen::VectorXd> hull_2d(std::vector<Eigen::VectorXd> pts) {
  std::sort(pts.begin(), pts.end(),
            [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
              return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
            });
  const auto cross = [](const Eigen::VectorXd& o, const Eigen::VectorXd& a,
                        const Eigen::VectorXd& b) {
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
  };
  const int n = static_cast<int>(pts.size());
  if (n <= 2) return pts;
  std::vector<Eigen::VectorXd> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-14) --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-14) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

// Is p in conv(pool \ {skip_index})? Phase-1 feasibility of
// sum(lambda_j s_j) = p, sum(lambda) = 1, lambda >= 0.
bool in_convex_hull(const Eigen::VectorXd& p,
                    const std::vector<Eigen::VectorXd>& pool, int skip_index) {
  const int d = static_cast<int>(p.size());
  std::vector<int> cols;
  for (int j = 0; j < static_cast<int>(pool.size()); ++j) {
    if (j != skip_index) cols.push_back(j);
  }
  if (cols.empty()) return false;
  Eigen::MatrixXd E(d + 1, cols.size());
  for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
    E.col(j).head(d) = pool[cols[j]];
    E(d, j) = 1.0;
  }
  Eigen::VectorXd f(d + 1);
  f.head(d) = p;
  f(d) = 1.0;
  const LpResult res =
      solve_standard_lp(E, f, Eigen::VectorXd::Zero(cols.size()));
  return res.status == LpStatus::kOptimal;
}

}  // namespace

ConvexPolytope::ConvexPolytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets)
    : normals_(std::move(normals)), offsets_(std::move(offsets)) {
  if (normals_.rows() == 0 || normals_.cols() == 0) {
    throw std::invalid_argument("ConvexPolytope: empty halfspace list");
  }
  if (normals_.rows() != offsets_.size()) {
    throw std::invalid_argument("ConvexPolytope: normals/offsets mismatch");
  }
  for (int i = 0; i < normals_.rows(); ++i) {
    if (normals_.row(i).norm() == 0.0) {
      throw std::invalid_argument("ConvexPolytope: zero normal");
    }
  }
}

bool ConvexPolytope::contains(const Eigen::VectorXd& x, double tol) const {
  return ((normals_ * x - offsets_).array() <= tol).all();
}

ConvexPolytope ConvexPolytope::axis_box(const Eigen::VectorXd& lo,
                                        const Eigen::VectorXd& hi) {
  const int d = static_cast<int>(lo.size());
  Eigen::MatrixXd normals(2 * d, d);
  Eigen::VectorXd offsets(2 * d);
  normals.setZero();
  for (int k = 0; k < d; ++k) {
    normals(2 * k, k) = 1.0;
    offsets(2 * k) = hi(k);
    normals(2 * k + 1, k) = -1.0;
    offsets(2 * k + 1) = -lo(k);
  }
  return ConvexPolytope(std::move(normals), std::move(offsets));
}

ConvexPolytope ConvexPolytope::centered_box(int dim, double half_width) {
  return axis_box(Eigen::VectorXd::Constant(dim, -half_width),
                  Eigen::VectorXd::Constant(dim, half_width));
}

ConvexPolytope ConvexPolytope::canonical_empty(int dim) {
  Eigen::MatrixXd normals = Eigen::MatrixXd::Zero(2, dim);
  normals(0, 0) = 1.0;
  normals(1, 0) = -1.0;
  Eigen::VectorXd offsets = Eigen::VectorXd::Constant(2, -1.0);
  return ConvexPolytope(std::move(normals), std::move(offsets));
}

Ellipsoid::Ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape)
    : center_(std::move(center)), shape_(std::move(shape)) {
  if (shape_.rows() != shape_.cols() || shape_.rows() != center_.size()) {
    throw std::invalid_argument("Ellipsoid: dimension mismatch");
  }
  const double asym = (shape_ - shape_.transpose()).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, shape_.cwiseAbs().maxCoeff());
  if (asym > 1e-10 * scale) {
    throw std::invalid_argument("Ellipsoid: shape not symmetric");
  }
  shape_ = 0.5 * (shape_ + shape_.transpose().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shape_);
  if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw std::invalid_argument("Ellipsoid: shape not PSD");
  }
  Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
  shape_ = eig.eigenvectors() * clamped.asDiagonal() *
           eig.eigenvectors().transpose();
}

double Ellipsoid::quadratic_form(const Eigen::VectorXd& x) const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shape_);
  const Eigen::VectorXd y = eig.eigenvectors().transpose() * (x - center_);
  const double scale = std::max(1.0, eig.eigenvalues().maxCoeff());
  double q = 0.0;
  for (int i = 0; i < y.size(); ++i) {
    const double lam = eig.eigenvalues()(i);
    if (lam > 1e-14 * scale) {
      q += y(i) * y(i) / lam;
    } else if (std::abs(y(i)) > 1e-9 * std::sqrt(scale)) {
      return kInf;  // offset along a flat direction
    }
  }
  return q;
}

bool Ellipsoid::contains(const Eigen::VectorXd& x, double tol) const {
  return quadratic_form(x) <= 1.0 + tol;
}

Ball::Ball(Eigen::VectorXd c, double r) : center(std::move(c)), radius(r) {
  if (radius < 0.0) throw std::invalid_argument("Ball: negative radius");
}

double support(const ConvexPolytope& p, const Eigen::VectorXd& dir) {
  const double v = support_lp(p.normals(), p.offsets(), dir);
  if (v == kInf) {
    throw UnboundedDirectionError("polytope support unbounded");
  }
  return v;
}

double support(const Ellipsoid& e, const Eigen::VectorXd& dir) {
  const double q = dir.dot(e.shape() * dir);
  return dir.dot(e.center()) + std::sqrt(std::max(q, 0.0));
}

double support(const Ball& b, const Eigen::VectorXd& dir) {
  return dir.dot(b.center) + b.radius * dir.norm();
}

double support(const ConvexSet& s, const Eigen::VectorXd& dir) {
  return std::visit([&](const auto& v) { return support(v, dir); }, s);
}

SupportFunction support_function(const ConvexSet& s) {
  return [s](const Eigen::VectorXd& dir) { return support(s, dir); };
}

SupportFunction negated_support(const ConvexSet& s) {
  return [s](const Eigen::VectorXd& dir) { return support(s, -dir); };
}

SupportFunction mapped_support(const Eigen::MatrixXd& map, const ConvexSet& s) {
  return [map, s](const Eigen::VectorXd& dir) {
    return support(s, map.transpose() * dir);
  };
}

double minkowski_sum_support(const ConvexSet& a, const ConvexSet& b,
                             const Eigen::VectorXd& dir) {
  return support(a, dir) + support(b, dir);
}

ConvexPolytope pontryagin_difference(const ConvexPolytope& p,
                                     const SupportFunction& s) {
  Eigen::VectorXd offsets = p.offsets();
  for (int i = 0; i < p.num_halfspaces(); ++i) {
    offsets(i) -= s(p.normals().row(i).transpose());
  }
  return ConvexPolytope(p.normals(), std::move(offsets));
}

ConvexPolytope pontryagin_difference(const ConvexPolytope& p,
                                     const ConvexSet& s) {
  return pontryagin_difference(p, support_function(s));
}

ConvexPolytope affine_preimage(const ConvexPolytope& p,
                               const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() != p.dim()) {
    throw std::invalid_argument("affine_preimage: matrix shape mismatch");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin >= 1e12) {
    throw SingularMatrixError("affine_preimage: matrix singular");
  }
  return ConvexPolytope(p.normals() * m, p.offsets());
}

ConvexPolytope intersect(const ConvexPolytope& a, const ConvexPolytope& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("intersect: dimension mismatch");
  }
  Eigen::MatrixXd normals(a.num_halfspaces() + b.num_halfspaces(), a.dim());
  Eigen::VectorXd offsets(normals.rows());
  normals << a.normals(), b.normals();
  offsets << a.offsets(), b.offsets();
  return ConvexPolytope(std::move(normals), std::move(offsets));
}

bool is_empty(const ConvexPolytope& p) {
  const int m = p.num_halfspaces();
  const int d = p.dim();
  Eigen::MatrixXd E(m, 2 * d + m);
  E << p.normals(), -p.normals(), Eigen::MatrixXd::Identity(m, m);
  const LpResult res =
      solve_standard_lp(E, p.offsets(), Eigen::VectorXd::Zero(2 * d + m));
  return res.status == LpStatus::kInfeasible;
}

bool is_bounded(const ConvexPolytope& p) {
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(p.dim());
  for (int k = 0; k < p.dim(); ++k) {
    for (double sign : {1.0, -1.0}) {
      dir.setZero();
      dir(k) = sign;
      if (support_lp(p.normals(), p.offsets(), dir) == kInf) return false;
    }
  }
  return true;
}

bool contained_in(const ConvexPolytope& a, const ConvexPolytope& b,
                  double slack) {
  if (is_empty(a)) return true;
  for (int i = 0; i < b.num_halfspaces(); ++i) {
    const double s =
        support_lp(a.normals(), a.offsets(), b.normals().row(i).transpose());
    if (s > b.offsets()(i) + slack) return false;
  }
  return true;
}

ConvexPolytope prune_redundant(const ConvexPolytope& p, double slack) {
  if (is_empty(p)) return p;
  const int m = p.num_halfspaces();
  std::vector<bool> keep(m, true);

  // Exact duplicates first (compared after normalization).
  for (int i = 0; i < m; ++i) {
    if (!keep[i]) continue;
    const double ni = p.normals().row(i).norm();
    for (int j = i + 1; j < m; ++j) {
      if (!keep[j]) continue;
      const double nj = p.normals().row(j).norm();
      if ((p.normals().row(i) / ni - p.normals().row(j) / nj).norm() < 1e-12 &&
          std::abs(p.offsets()(i) / ni - p.offsets()(j) / nj) < 1e-12) {
        keep[j] = false;
      }
    }
  }

  for (int i = 0; i < m; ++i) {
    if (!keep[i]) continue;
    std::vector<int> rest;
    for (int j = 0; j < m; ++j) {
      if (keep[j] && j != i) rest.push_back(j);
    }
    if (rest.empty()) break;
    Eigen::MatrixXd normals(rest.size(), p.dim());
    Eigen::VectorXd offsets(rest.size());
    for (int r = 0; r < static_cast<int>(rest.size()); ++r) {
      normals.row(r) = p.normals().row(rest[r]);
      offsets(r) = p.offsets()(rest[r]);
    }
    const double s = support_lp(normals, offsets, p.normals().row(i).transpose());
    if (s <= p.offsets()(i) + slack) keep[i] = false;
  }

  int kept = static_cast<int>(std::count(keep.begin(), keep.end(), true));
  if (kept == 0) return p;
  Eigen::MatrixXd normals(kept, p.dim());
  Eigen::VectorXd offsets(kept);
  int r = 0;
  for (int i = 0; i < m; ++i) {
    if (!keep[i]) continue;
    normals.row(r) = p.normals().row(i);
    offsets(r) = p.offsets()(i);
    ++r;
  }
  return ConvexPolytope(std::move(normals), std::move(offsets));
}

std::vector<Eigen::VectorXd> enumerate_vertices(const ConvexPolytope& p) {
  const int d = p.dim();
  const int m = p.num_halfspaces();
  if (is_empty(p)) return {};

  // Flat sets become full-dimensional under a 1e-9 box inflation; for
  // already full-dimensional sets the perturbation is below the dedup
  // tolerance of downstream consumers.
  Eigen::MatrixXd normals = p.normals();
  Eigen::VectorXd offsets = p.offsets();
  for (int i = 0; i < m; ++i) {
    offsets(i) += 1e-9 * normals.row(i).lpNorm<1>();
  }

  std::vector<Eigen::VectorXd> vertices;
  std::vector<int> combo(d);
  const std::function<void(int, int)> recurse = [&](int start, int depth) {
    if (depth == d) {
      Eigen::MatrixXd A(d, d);
      Eigen::VectorXd b(d);
      for (int k = 0; k < d; ++k) {
        A.row(k) = normals.row(combo[k]);
        b(k) = offsets(combo[k]);
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      lu.setThreshold(1e-10);
      if (lu.rank() < d) return;
      const Eigen::VectorXd x = lu.solve(b);
      if (!x.allFinite()) return;
      const double scale = std::max(1.0, x.lpNorm<Eigen::Infinity>());
      if (((normals * x - offsets).array() <= 1e-7 * scale).all()) {
        vertices.push_back(x);
      }
      return;
    }
    for (int i = start; i <= m - (d - depth); ++i) {
      combo[depth] = i;
      recurse(i + 1, depth + 1);
    }
  };
  recurse(0, 0);

  vertices = dedup_points(std::move(vertices), 1e-8);
  if (vertices.empty()) {
    throw DegenerateInputError("enumerate_vertices: no vertices found");
  }
  return vertices;
}

std::vector<Eigen::VectorXd> extreme_points(
    std::vector<Eigen::VectorXd> points) {
  points = dedup_points(std::move(points), 1e-9);
  if (points.empty()) return points;
  const int d = static_cast<int>(points.front().size());

  if (d == 1) {
    auto [lo, hi] = std::minmax_element(
        points.begin(), points.end(),
        [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
          return a(0) < b(0);
        });
    std::vector<Eigen::VectorXd> out{*lo};
    if ((*hi - *lo).norm() > 0) out.push_back(*hi);
    return out;
  }
  if (d == 2) return hull_2d(std::move(points));

  std::vector<Eigen::VectorXd> pool = std::move(points);
  for (int i = static_cast<int>(pool.size()) - 1; i >= 0; --i) {
    if (in_convex_hull(pool[i], pool, i)) {
      pool.erase(pool.begin() + i);
    }
  }
  return pool;
}

std::vector<Eigen::VectorXd> convex_hull_vertices(
    std::span<const ConvexPolytope> sets) {
  std::vector<Eigen::VectorXd> all;
  for (const auto& s : sets) {
    auto v = enumerate_vertices(s);
    all.insert(all.end(), v.begin(), v.end());
  }
  return extreme_points(std::move(all));
}

Ellipsoid min_volume_enclosing_ellipsoid(std::span<const Eigen::VectorXd> pts,
                                         double tol, int max_iters) {
  if (pts.empty()) {
    throw DegenerateInputError("min_volume_enclosing_ellipsoid: no points");
  }
  const int d = static_cast<int>(pts.front().size());
  std::vector<Eigen::VectorXd> work(pts.begin(), pts.end());

  // Inflate rank-deficient inputs by a 1e-9 axis cross.
  {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& p : work) mean += p;
    mean /= static_cast<double>(work.size());
    Eigen::MatrixXd centered(work.size(), d);
    for (int i = 0; i < static_cast<int>(work.size()); ++i) {
      centered.row(i) = (work[i] - mean).transpose();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered);
    const int rank =
        (svd.singularValues().array() > 1e-12 * std::max(1.0, svd.singularValues().maxCoeff()))
            .count();
    if (rank < d) {
      for (int k = 0; k < d; ++k) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
        e(k) = 1e-9;
        work.push_back(mean + e);
        work.push_back(mean - e);
      }
    }
  }

  const int n = static_cast<int>(work.size());
  Eigen::MatrixXd Q(d + 1, n);
  for (int i = 0; i < n; ++i) {
    Q.col(i).head(d) = work[i];
    Q(d, i) = 1.0;
  }

  Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / n);
  Eigen::MatrixXd X = Q * u.asDiagonal() * Q.transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(X);
  if (!lu.isInvertible()) {
    throw DegenerateInputError(
        "min_volume_enclosing_ellipsoid: degenerate point set");
  }
  Eigen::MatrixXd Xinv = lu.inverse();

  const double target = static_cast<double>(d + 1);
  for (int iter = 0; iter < max_iters; ++iter) {
    if (iter % 50 == 0 && iter > 0) {
      X = Q * u.asDiagonal() * Q.transpose();
      Xinv = X.fullPivLu().inverse();
    }
    // kappa_i = q_i' X^{-1} q_i
    Eigen::VectorXd kappa(n);
    const Eigen::MatrixXd XiQ = Xinv * Q;
    for (int i = 0; i < n; ++i) kappa(i) = Q.col(i).dot(XiQ.col(i));

    int j_up;
    const double k_up = kappa.maxCoeff(&j_up);
    int j_dn = -1;
    double k_dn = kInf;
    for (int i = 0; i < n; ++i) {
      if (u(i) > 1e-12 && kappa(i) < k_dn) {
        k_dn = kappa(i);
        j_dn = i;
      }
    }
    const double viol_up = k_up / target - 1.0;
    const double viol_dn = (j_dn >= 0) ? 1.0 - k_dn / target : 0.0;
    if (viol_up <= tol && viol_dn <= tol) break;

    int j;
    double kap;
    if (viol_up >= viol_dn) {
      j = j_up;
      kap = k_up;
    } else {
      j = j_dn;
      kap = k_dn;
    }
    double beta = (kap - target) / (target * (kap - 1.0));
    if (beta < 0.0) {
      beta = std::max(beta, -u(j) / (1.0 - u(j)));  // keep u(j) >= 0
    }
    if (beta == 0.0) break;
    u *= (1.0 - beta);
    u(j) += beta;
    u = u.cwiseMax(0.0);

    // Rank-1 update of X^{-1}: X_new = (1-b) X + b q q'.
    const Eigen::VectorXd Xq = Xinv * Q.col(j);
    const double denom = 1.0 - beta + beta * kap;
    Xinv = (Xinv - (beta / denom) * (Xq * Xq.transpose())) / (1.0 - beta);
  }

  Eigen::VectorXd center = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) center += u(i) * work[i];
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    scatter += u(i) * (work[i] * work[i].transpose());
  }
  scatter -= center * center.transpose();
  Eigen::MatrixXd shape = static_cast<double>(d) * scatter;
  shape = 0.5 * (shape + shape.transpose().eval());

  // Rescale so the farthest point lies exactly on the boundary.
  Eigen::FullPivLU<Eigen::MatrixXd> shape_lu(shape);
  if (!shape_lu.isInvertible()) {
    throw DegenerateInputError(
        "min_volume_enclosing_ellipsoid: flat result shape");
  }
  const Eigen::MatrixXd shape_inv = shape_lu.inverse();
  double worst = 0.0;
  for (const auto& p : work) {
    const Eigen::VectorXd delta = p - center;
    worst = std::max(worst, delta.dot(shape_inv * delta));
  }
  if (worst > 0.0) shape *= worst;
  return Ellipsoid(center, shape);
}

ConvexPolytope project_onto_first(const ConvexPolytope& p, int keep_dims) {
  if (keep_dims <= 0 || keep_dims > p.dim()) {
    throw std::invalid_argument("project_onto_first: bad dimension");
  }
  Eigen::MatrixXd normals = p.normals();
  Eigen::VectorXd offsets = p.offsets();

  for (int col = p.dim() - 1; col >= keep_dims; --col) {
    std::vector<int> pos, neg, zer;
    for (int i = 0; i < normals.rows(); ++i) {
      const double a = normals(i, col);
      const double scale = std::max(1.0, normals.row(i).cwiseAbs().maxCoeff());
      if (a > 1e-12 * scale) {
        pos.push_back(i);
      } else if (a < -1e-12 * scale) {
        neg.push_back(i);
      } else {
        zer.push_back(i);
      }
    }
    const int combos = static_cast<int>(pos.size() * neg.size());
    Eigen::MatrixXd next(static_cast<int>(zer.size()) + combos, col);
    Eigen::VectorXd noff(next.rows());
    int r = 0;
    for (int i : zer) {
      next.row(r) = normals.row(i).head(col);
      noff(r) = offsets(i);
      ++r;
    }
    for (int ip : pos) {
      for (int in : neg) {
        const double ap = normals(ip, col);
        const double an = -normals(in, col);
        next.row(r) =
            normals.row(ip).head(col) / ap + normals.row(in).head(col) / an;
        noff(r) = offsets(ip) / ap + offsets(in) / an;
        ++r;
      }
    }

    // Drop vacuous rows; a contradictory zero row empties the projection.
    std::vector<int> keep;
    for (int i = 0; i < next.rows(); ++i) {
      const double nrm = next.row(i).cwiseAbs().maxCoeff();
      if (nrm <= 1e-12) {
        if (noff(i) < -1e-9) return ConvexPolytope::canonical_empty(keep_dims);
        continue;
      }
      keep.push_back(i);
    }
    if (keep.empty()) {
      // Projection is all of R^keep_dims; callers intersect with bounded
      // sets, so represent with a huge box.
      return ConvexPolytope::centered_box(keep_dims, 1e12);
    }
    Eigen::MatrixXd kn(keep.size(), col);
    Eigen::VectorXd ko(keep.size());
    for (int i = 0; i < static_cast<int>(keep.size()); ++i) {
      kn.row(i) = next.row(keep[i]) / next.row(keep[i]).norm();
      ko(i) = noff(keep[i]) / next.row(keep[i]).norm();
    }
    ConvexPolytope reduced(std::move(kn), std::move(ko));
    reduced = prune_redundant(reduced, 1e-9);
    normals = reduced.normals();
    offsets = reduced.offsets();
  }
  return ConvexPolytope(std::move(normals), std::move(offsets));
}

ConvexPolytope tangent_polygon(const Ball& b, int sides) {
  if (b.dim() != 2) {
    throw std::invalid_argument("tangent_polygon: only 2-D supported");
  }
  if (sides < 3) throw std::invalid_argument("tangent_polygon: sides < 3");
  Eigen::MatrixXd normals(sides, 2);
  Eigen::VectorXd offsets(sides);
  for (int i = 0; i < sides; ++i) {
    const double theta = 2.0 * M_PI * i / sides;
    normals(i, 0) = std::cos(theta);
    normals(i, 1) = std::sin(theta);
    offsets(i) = b.radius + normals.row(i).dot(b.center);
  }
  return ConvexPolytope(std::move(normals), std::move(offsets));
}

}  // namespace pssf
