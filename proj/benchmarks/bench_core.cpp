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

#include <benchmark/benchmark.h>

#include "helpers.hpp"
#include "pssf/planner.hpp"
#include "pssf/qp.hpp"

using namespace pssf;

namespace {

Scenario bench_scenario() {
  static const Scenario scn = pssf_test::make_small_scenario();
  return scn;
}

void BM_PolytopeSupport(benchmark::State& state) {
  const ConvexPolytope box = ConvexPolytope::centered_box(4, 1.0);
  Eigen::VectorXd dir(4);
  dir << 0.3, -0.8, 0.5, 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(support(box, dir));
  }
}
BENCHMARK(BM_PolytopeSupport);

void BM_InverseNormalCdf(benchmark::State& state) {
  double p = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse_normal_cdf(p));
    p = p < 0.5 ? p * 1.01 : 1e-6;
  }
}
BENCHMARK(BM_InverseNormalCdf);

void BM_Prop1Assembly(benchmark::State& state) {
  const Scenario scn = bench_scenario();
  const ReferencePolicy policy = make_policy(scn);
  const Plan plan = rollout(policy, {scn.starts[0], scn.starts[1]}, scn);
  const PredictionModel model =
      PredictionModel::build(scn.system, scn.horizon());
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_prop1_constraints(plan, model, scn));
  }
}
BENCHMARK(BM_Prop1Assembly);

void BM_FilterTickSolve(benchmark::State& state) {
  const Scenario scn = bench_scenario();
  const ReferencePolicy policy = make_policy(scn);
  const Plan plan = rollout(policy, {scn.starts[0], scn.starts[1]}, scn);
  const PredictionModel model =
      PredictionModel::build(scn.system, scn.horizon());
  const LinearConstraintSet p1 = build_prop1_constraints(plan, model, scn);
  LinearConstraintSet p2;
  p2.map = p1.map;
  const QpProblem qp = assemble(plan, p1, p2, scn);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(qp));
  }
}
BENCHMARK(BM_FilterTickSolve);

void BM_BeliefPropagation(benchmark::State& state) {
  LinearSystem sys = double_integrator_2d(0.1);
  sys.sigma_w = Eigen::Vector4d(1e-4, 1e-4, 0, 0).asDiagonal();
  GaussianBelief belief{Eigen::VectorXd::Zero(4),
                        Eigen::MatrixXd::Identity(4, 4) * 1e-4};
  const Eigen::VectorXd u = Eigen::VectorXd::Ones(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(propagate_belief(sys, belief, u));
  }
}
BENCHMARK(BM_BeliefPropagation);

}  // namespace

BENCHMARK_MAIN();
