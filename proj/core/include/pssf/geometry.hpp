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

#ifndef PSSF_GEOMETRY_HPP_
#define PSSF_GEOMETRY_HPP_

#include <Eigen/Core>
#include <functional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace pssf {

struct UnboundedDirectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Intersection of halfspaces {x : normals.row(i) . x <= offsets(i)}. The
/// system may be contradictory; emptiness is a queryable state, not an error.
class ConvexPolytope {
 public:
  ConvexPolytope(Eigen::MatrixXd normals, Eigen::VectorXd offsets);

  int dim() const { return static_cast<int>(normals_.cols()); }
  int num_halfspaces() const { return static_cast<int>(normals_.rows()); }
  const Eigen::MatrixXd& normals() const { return normals_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;

  /// {x : lo <= x <= hi} as 2*dim halfspaces.
  static ConvexPolytope axis_box(const Eigen::VectorXd& lo,
                                 const Eigen::VectorXd& hi);
  /// Centered cube {|x_i| <= half_width}.
  static ConvexPolytope centered_box(int dim, double half_width);
  /// A canonical contradictory system (x_1 <= -1, -x_1 <= -1).
  static ConvexPolytope canonical_empty(int dim);

 private:
  Eigen::MatrixXd normals_;
  Eigen::VectorXd offsets_;
};

/// {x : (x-c)' Q^{-1} (x-c) <= 1}; Q symmetric PSD, degenerate directions
/// treated as flat. The constructor symmetrizes within 1e-10 and clamps
/// eigenvalues below -1e-12 to zero.
class Ellipsoid {
 public:
  Ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd shape);

  int dim() const { return static_cast<int>(center_.size()); }
  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& shape() const { return shape_; }

  /// (x-c)' Q^+ (x-c), using the pseudo-inverse in degenerate directions.
  double quadratic_form(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x, double tol = 1e-8) const;

 private:
  Eigen::VectorXd center_;
  Eigen::MatrixXd shape_;
};

struct Ball {
  Eigen::VectorXd center;
  double radius = 0.0;

  Ball(Eigen::VectorXd c, double r);
  int dim() const { return static_cast<int>(center.size()); }
};

using ConvexSet = std::variant<ConvexPolytope, Ellipsoid, Ball>;
using SupportFunction = std::function<double(const Eigen::VectorXd&)>;

/// S(l) = sup_{x in set} l.x. Polytope support solves a small LP on the
/// H-representation and throws UnboundedDirectionError when unbounded.
double support(const ConvexPolytope& p, const Eigen::VectorXd& dir);
double support(const Ellipsoid& e, const Eigen::VectorXd& dir);
double support(const Ball& b, const Eigen::VectorXd& dir);
double support(const ConvexSet& s, const Eigen::VectorXd& dir);

SupportFunction support_function(const ConvexSet& s);
/// Support of -S: S_{-S}(l) = S_S(-l).
SupportFunction negated_support(const ConvexSet& s);
/// Support of M*S: S_{MS}(l) = S_S(M'l).
SupportFunction mapped_support(const Eigen::MatrixXd& map, const ConvexSet& s);

/// S_{A (+) B}(l) = S_A(l) + S_B(l).
double minkowski_sum_support(const ConvexSet& a, const ConvexSet& b,
                             const Eigen::VectorXd& dir);

/// P (-) S by offset shrinking: halfspace (a_i, b_i) -> (a_i, b_i - S_S(a_i)).
/// The result may be empty; callers detect that with is_empty.
ConvexPolytope pontryagin_difference(const ConvexPolytope& p,
                                     const SupportFunction& s);
ConvexPolytope pontryagin_difference(const ConvexPolytope& p,
                                     const ConvexSet& s);

/// {x : Mx in p} for invertible square M (condition number < 1e12).
ConvexPolytope affine_preimage(const ConvexPolytope& p,
                               const Eigen::MatrixXd& m);

ConvexPolytope intersect(const ConvexPolytope& a, const ConvexPolytope& b);

bool is_empty(const ConvexPolytope& p);
/// Support finite along +/- every axis direction.
bool is_bounded(const ConvexPolytope& p);
/// a subset of b, each halfspace of b implied within slack.
bool contained_in(const ConvexPolytope& a, const ConvexPolytope& b,
                  double slack = 1e-8);

/// Drops halfspaces implied by the others. No-op on empty input sets.
ConvexPolytope prune_redundant(const ConvexPolytope& p, double slack = 1e-9);

/// Vertices of a bounded polytope. Flat inputs are inflated by 1e-9 along
/// every axis first; throws DegenerateInputError if enumeration still fails.
std::vector<Eigen::VectorXd> enumerate_vertices(const ConvexPolytope& p);

/// Extreme points of conv(union of the given polytopes).
std::vector<Eigen::VectorXd> convex_hull_vertices(
    std::span<const ConvexPolytope> sets);
std::vector<Eigen::VectorXd> extreme_points(
    std::vector<Eigen::VectorXd> points);

/// Loewner-John ellipsoid by Khachiyan barycentric ascent. The result is
/// rescaled so every input point is contained (the farthest sits on the
/// boundary). Throws DegenerateInputError when the points are not
/// full-dimensional even after a 1e-9 inflation.
Ellipsoid min_volume_enclosing_ellipsoid(std::span<const Eigen::VectorXd> pts,
                                         double tol = 1e-7,
                                         int max_iters = 100000);

/// Orthogonal projection onto the first keep_dims coordinates by
/// Fourier-Motzkin elimination with redundancy pruning per eliminated
/// variable. Exact for bounded inputs.
ConvexPolytope project_onto_first(const ConvexPolytope& p, int keep_dims);

/// Outer polygonal approximation of a disk by `sides` tangent halfspaces.
ConvexPolytope tangent_polygon(const Ball& b, int sides);

}  // namespace pssf

#endif  // PSSF_GEOMETRY_HPP_
