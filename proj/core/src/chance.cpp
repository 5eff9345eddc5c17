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

#include "pssf/chance.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace pssf {

namespace {

// Wichura's PPND16 rational approximation (AS 241).
double ppnd16(double p) {
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                   6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
               1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
              3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
            5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
            3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

double standard_normal_pdf(double x) {
  static const double kInvSqrt2Pi = 0.3989422804014326779;
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

}  // namespace

double standard_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("inverse_normal_cdf: p outside (0,1)");
  }
  double x = ppnd16(p);
  // One Halley step against the CDF.
  const double pdf = standard_normal_pdf(x);
  if (pdf > 0.0) {
    const double residual = (standard_normal_cdf(x) - p) / pdf;
    x -= 2.0 * residual / (2.0 + residual * x);
  }
  return x;
}

double chebyshev_quantile(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("chebyshev_quantile: alpha outside (0,1)");
  }
  return std::sqrt((1.0 - alpha) / alpha);
}

double allocate_risk(double trajectory_risk, int horizon) {
  if (!(trajectory_risk > 0.0 && trajectory_risk < 1.0)) {
    throw std::domain_error("allocate_risk: risk outside (0,1)");
  }
  if (horizon < 1) throw std::domain_error("allocate_risk: horizon < 1");
  return trajectory_risk / horizon;
}

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (m + m.transpose().eval()));
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

namespace {

double tightening_norm(const Eigen::MatrixXd& cov, const Eigen::VectorXd& a) {
  // ||Sigma^{1/2} a|| = sqrt(a' Sigma a) for the symmetric root.
  const double q = a.dot(0.5 * (cov + cov.transpose().eval()) * a);
  return std::sqrt(std::max(q, 0.0));
}

}  // namespace

TightenedHalfspace tighten_upper(const Eigen::VectorXd& a, double b,
                                 const Eigen::MatrixXd& cov, double alpha,
                                 ConstraintKind kind) {
  const double offset = b - tightening_norm(cov, a) * inverse_normal_cdf(alpha);
  return TightenedHalfspace{a, offset, kind};
}

TightenedHalfspace tighten_lower(const Eigen::VectorXd& a, double b,
                                 const Eigen::MatrixXd& cov, double alpha,
                                 ConstraintKind kind) {
  const double offset =
      b - tightening_norm(cov, a) * inverse_normal_cdf(1.0 - alpha);
  return TightenedHalfspace{a, offset, kind};
}

void RiskBudget::validate() const {
  const auto in_unit = [](double r) { return r > 0.0 && r < 1.0; };
  if (!in_unit(alpha_obstacle) || !in_unit(beta_agent) ||
      !in_unit(kappa_keepin) || !in_unit(delta_terminal)) {
    throw std::invalid_argument("RiskBudget: risks must lie in (0,1)");
  }
  if (horizon < 1) throw std::invalid_argument("RiskBudget: horizon < 1");
}

}  // namespace pssf
