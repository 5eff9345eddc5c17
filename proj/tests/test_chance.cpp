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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/normal_oracle.hpp"
#include "pssf/chance.hpp"

using namespace pssf;

TEST_CASE("inverse normal CDF at hand-checked points") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.01) ==
        doctest::Approx(-2.326347874).epsilon(1e-9));
  CHECK(inverse_normal_cdf(1.0 - 2.5e-4) ==
        doctest::Approx(3.480756).epsilon(1e-6));
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::domain_error);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), std::domain_error);
}

TEST_CASE("quantile accuracy 1e-9 against the series oracle") {
  for (double exp10 = -10.0; exp10 <= -1.0; exp10 += 0.5) {
    const double p = std::pow(10.0, exp10);
    CHECK(std::abs(inverse_normal_cdf(p) - pssf_oracle::normal_quantile(p)) <=
          1e-9);
    CHECK(std::abs(inverse_normal_cdf(1.0 - p) -
                   pssf_oracle::normal_quantile(1.0 - p)) <= 1e-9);
  }
  for (double p = 0.05; p < 1.0; p += 0.05) {
    CHECK(std::abs(inverse_normal_cdf(p) - pssf_oracle::normal_quantile(p)) <=
          1e-9);
  }
}

TEST_CASE("quantile round trip within 1e-10") {
  for (double exp10 = -9.0; exp10 <= -1.0; exp10 += 0.25) {
    for (double side : {0.0, 1.0}) {
      const double tail = std::pow(10.0, exp10);
      const double p = side == 0.0 ? tail : 1.0 - tail;
      const double x = inverse_normal_cdf(p);
      const double back = static_cast<double>(pssf_oracle::normal_cdf(x));
      CHECK(std::abs(back - p) <= 1e-10);
    }
  }
}

TEST_CASE("chebyshev quantile") {
  CHECK(chebyshev_quantile(0.5) == doctest::Approx(1.0));
  CHECK(chebyshev_quantile(0.01) == doctest::Approx(std::sqrt(99.0)));
  CHECK_THROWS_AS(chebyshev_quantile(0.0), std::domain_error);
  // Distribution-free bound dominates the Gaussian one below 50% risk.
  for (int i = 1; i < 1000; ++i) {
    const double alpha = 0.5 * i / 1000.0;
    CHECK(chebyshev_quantile(alpha) >= -inverse_normal_cdf(alpha) - 1e-12);
  }
}

TEST_CASE("risk allocation") {
  CHECK(allocate_risk(0.01, 10) == doctest::Approx(0.001));
  CHECK(allocate_risk(0.37, 1) == doctest::Approx(0.37));
  double sum = 0.0;
  for (int t = 0; t < 10; ++t) sum += allocate_risk(0.01, 10);
  CHECK(std::abs(sum - 0.01) <= 1e-15);
}

TEST_CASE("risk budget per-step allocation sums to the trajectory budget") {
  RiskBudget budget;
  budget.alpha_obstacle = 0.01;
  budget.beta_agent = 0.02;
  budget.kappa_keepin = 0.03;
  budget.horizon = 7;
  budget.validate();
  CHECK(std::abs(budget.per_step_obstacle() * 7 - 0.01) <= 1e-12);
  CHECK(std::abs(budget.per_step_agent() * 7 - 0.02) <= 1e-12);
  CHECK(std::abs(budget.per_step_keepin() * 7 - 0.03) <= 1e-12);
  budget.alpha_obstacle = 1.5;
  CHECK_THROWS_AS(budget.validate(), std::invalid_argument);
}

TEST_CASE("tighten_upper basics") {
  Eigen::VectorXd a(2);
  a << 1, 0;
  SUBCASE("deterministic when covariance vanishes") {
    const auto t =
        tighten_upper(a, 0.7, Eigen::Matrix2d::Zero(), 0.01);
    CHECK(t.offset == doctest::Approx(0.7).epsilon(1e-12));
  }
  SUBCASE("unit covariance at alpha 0.01") {
    const auto t =
        tighten_upper(a, 0.0, Eigen::Matrix2d::Identity(), 0.01);
    CHECK(t.offset == doctest::Approx(2.326347874).epsilon(1e-8));
  }
  SUBCASE("Monte-Carlo validation at the tightened boundary") {
    const auto t =
        tighten_upper(a, 0.0, Eigen::Matrix2d::Identity(), 0.01);
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> normal(0.0, 1.0);
    int below = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
      const double y = t.offset + normal(rng);  // mean on the boundary
      if (y <= 0.0) ++below;
    }
    const double freq = static_cast<double>(below) / n;
    CHECK(freq > 0.009);
    CHECK(freq < 0.011);
  }
}

TEST_CASE("tighten_lower keep-in example from the workspace wall") {
  Eigen::VectorXd a(2);
  a << 1, 0;
  SUBCASE("deterministic when covariance vanishes") {
    const auto t = tighten_lower(a, 1.4, Eigen::Matrix2d::Zero(), 2.5e-4);
    CHECK(t.offset == doctest::Approx(1.4).epsilon(1e-12));
  }
  SUBCASE("eroded 3x3 wall with per-wall risk") {
    const Eigen::Matrix2d cov = 2e-4 * Eigen::Matrix2d::Identity();
    const auto t = tighten_lower(a, 1.4, cov, 2.5e-4);
    CHECK(t.offset == doctest::Approx(1.35078).epsilon(1e-4));
    const double expected =
        1.4 - std::sqrt(2e-4) * pssf_oracle::normal_quantile(1.0 - 2.5e-4);
    CHECK(t.offset == doctest::Approx(expected).epsilon(1e-10));
  }
  SUBCASE("tightening vanishes at 50% risk") {
    const Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();
    const auto t = tighten_lower(a, 1.0, cov, 0.5 - 1e-12);
    CHECK(t.offset == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("reformulation equivalence on random tuples (Lemma 1 is iff)") {
  std::mt19937 rng(99);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 400 && checked < 200; ++trial) {
    const int d = 2 + trial % 3;
    Eigen::VectorXd a(d), mean(d);
    for (int i = 0; i < d; ++i) {
      a(i) = normal(rng);
      mean(i) = normal(rng);
    }
    if (a.norm() < 1e-3) continue;
    Eigen::MatrixXd root(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) root(i, j) = 0.5 * normal(rng);
    }
    const Eigen::MatrixXd cov = root * root.transpose();
    const double b = normal(rng);
    const double alpha = 0.01 + 0.98 * unif(rng);

    const double sigma = std::sqrt(std::max(a.dot(cov * a), 0.0));
    if (sigma < 1e-9) continue;
    // Exact probability by 1-D reduction: a.y ~ N(a.mean, a' cov a).
    const double exact = static_cast<double>(
        pssf_oracle::normal_cdf((b - a.dot(mean)) / sigma));
    const auto t = tighten_upper(a, b, cov, alpha);
    const double slack = a.dot(mean) - t.offset;
    if (std::abs(exact - alpha) < 1e-9 || std::abs(slack) < 1e-9) {
      continue;  // boundary tolerance
    }
    CHECK((slack >= 0.0) == (exact <= alpha));
    ++checked;
  }
  CHECK(checked >= 200);
}

TEST_CASE("tightening magnitude monotone in alpha and covariance") {
  Eigen::VectorXd a(2);
  a << 0.6, -0.8;
  const Eigen::Matrix2d cov =
      (Eigen::Matrix2d() << 0.5, 0.1, 0.1, 0.3).finished();
  double prev = std::numeric_limits<double>::infinity();
  for (double alpha = 0.001; alpha < 0.5; alpha += 0.007) {
    const auto t = tighten_upper(a, 0.0, cov, alpha);
    const double magnitude = t.offset;  // = -||S a|| Phi^-1(alpha) >= 0
    CHECK(magnitude <= prev + 1e-12);
    prev = magnitude;
  }
  // Loewner scaling: larger covariance tightens at least as much.
  double prev_scale = 0.0;
  for (double scale = 0.1; scale <= 3.0; scale += 0.1) {
    const auto t = tighten_upper(a, 0.0, (scale * cov).eval(), 0.01);
    CHECK(t.offset >= prev_scale - 1e-12);
    prev_scale = t.offset;
  }
}

TEST_CASE("sqrt_psd squares back and clamps negatives") {
  Eigen::MatrixXd m(2, 2);
  m << 4, 0, 0, 0;
  const Eigen::MatrixXd s = sqrt_psd(m);
  CHECK((s * s - m).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::MatrixXd tiny_negative(2, 2);
  tiny_negative << 1, 0, 0, -1e-15;
  const Eigen::MatrixXd s2 = sqrt_psd(tiny_negative);
  CHECK(s2(1, 1) == 0.0);
}
