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

#include <json.hpp>

#include "helpers.hpp"
#include "output_writers.hpp"
#include "pssf/reachability.hpp"
#include "pssf/scenario_text.hpp"

using namespace pssf;

TEST_CASE("bundled six-agent scenario parses and validates") {
  const Scenario scn = pssf_test::load_bundled_scenario("paper-sec4.scn");
  CHECK(scn.n_agents == 6);
  CHECK(scn.obstacles.size() == 7);
  CHECK(scn.risk.horizon == 10);
  CHECK(scn.risk.delta_terminal == doctest::Approx(0.1));
  CHECK(scn.system.sigma_w(0, 0) == doctest::Approx(1e-4));
  CHECK(scn.system.sigma_w(2, 2) == 0.0);
  CHECK(scn.workspace.num_halfspaces() == 4);
  CHECK(support(scn.workspace, Eigen::Vector2d(1, 0)) ==
        doctest::Approx(1.5));
}

TEST_CASE("scenario round trip through the text form") {
  const Scenario scn = pssf_test::load_bundled_scenario("paper-sec4.scn");
  const Scenario again = parse_scenario(serialize_scenario(scn));
  CHECK(scenario_hash(scn) == scenario_hash(again));
}

TEST_CASE("scenario diagnostics name the line and field") {
  const std::string base = pssf_test::read_file(
      std::string(PSSF_SCENARIO_DIR) + "/paper-sec4.scn");
  SUBCASE("missing version header") {
    CHECK_THROWS_WITH_AS(parse_scenario("x = 1\n"),
                         doctest::Contains("version header"),
                         ScenarioParseError);
  }
  SUBCASE("negative radius names the field") {
    std::string broken = base;
    const auto pos = broken.find("radius = 0.1");
    broken.replace(pos, 12, "radius = -1 ");
    try {
      parse_scenario(broken);
      FAIL("expected throw");
    } catch (const ScenarioParseError& e) {
      CHECK(std::string(e.what()).find("radius") != std::string::npos);
      CHECK(e.line > 0);
    }
  }
  SUBCASE("non-numeric value is rejected with its line") {
    std::string broken = base;
    const auto pos = broken.find("ts = 0.1");
    broken.replace(pos, 8, "ts = abc");
    try {
      parse_scenario(broken);
      FAIL("expected throw");
    } catch (const ScenarioParseError& e) {
      CHECK(e.line > 0);
      CHECK(std::string(e.what()).find("not a number") != std::string::npos);
    }
  }
  SUBCASE("target outside the eroded workspace is rejected") {
    std::string broken = base;
    const auto pos = broken.find("target = 1.3 1.0");
    broken.replace(pos, 16, "target = 1.49 1.");
    CHECK_THROWS_AS(parse_scenario(broken), ScenarioParseError);
  }
}

TEST_CASE("terminal set cache round trip and rejection") {
  Scenario scn = pssf_test::make_small_scenario();
  const TerminalSets sets = build_terminal_sets(scn, 100);
  const std::uint64_t hash = scenario_hash(scn);
  const std::string text = serialize_terminal_sets(sets, hash);

  SUBCASE("round trip reproduces the sets") {
    const TerminalSets parsed = parse_terminal_sets(text, hash);
    CHECK(parsed.avoid_obstacle.size() == sets.avoid_obstacle.size());
    CHECK((parsed.viability.normals() - sets.viability.normals())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    // The ellipsoid constructor re-symmetrizes on parse; equality up to
    // that canonicalization.
    CHECK((parsed.avoid_agent.shape() - sets.avoid_agent.shape())
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK(parsed.meta.viability_iterations == sets.meta.viability_iterations);
    // The writer itself is deterministic.
    CHECK(serialize_terminal_sets(sets, hash) == text);
  }
  SUBCASE("hash mismatch is rejected") {
    CHECK_THROWS_WITH_AS(parse_terminal_sets(text, hash + 1),
                         doctest::Contains("hash mismatch"),
                         std::runtime_error);
  }
  SUBCASE("version mismatch is rejected") {
    std::string broken = text;
    broken.replace(0, 1, "x");
    CHECK_THROWS_WITH_AS(parse_terminal_sets(broken, hash),
                         doctest::Contains("version"), std::runtime_error);
  }
}

TEST_CASE("trajectory CSV writer and parser round trip") {
  std::vector<std::vector<TrialResult>> results(1);
  results[0].resize(2);
  for (int trial = 0; trial < 2; ++trial) {
    for (int tick = 0; tick < 3; ++tick) {
      for (int agent = 0; agent < 2; ++agent) {
        TrajectoryRow row;
        row.tick = tick;
        row.agent = agent;
        row.px = 0.1 * trial + tick;
        row.py = -0.25 * agent;
        row.vx = 1.0 / 3.0;
        row.vy = -2.0 / 7.0;
        row.ux = 0.5;
        row.uy = trial == 0 ? 1e-17 : -1e-17;
        row.degraded = tick == 2;
        results[0][trial].trajectory.push_back(row);
      }
    }
  }
  const std::vector<ModeKey> modes{{FilterMode::kSafetyFilter, true}};
  const std::string csv = tools::trajectories_csv(results, modes);
  CHECK(csv.rfind("# pssf-trajectories-v1\n", 0) == 0);

  int n_trials = 0;
  const auto rows = tools::parse_trajectories_csv(csv, 1, &n_trials);
  CHECK(n_trials == 2);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].px == doctest::Approx(0.1).epsilon(1e-16));
  CHECK(rows[5].degraded);
  // Byte determinism of the writer itself.
  CHECK(tools::trajectories_csv(results, modes) == csv);

  SUBCASE("version header is enforced") {
    CHECK_THROWS_WITH_AS(
        tools::parse_trajectories_csv("# other\n" + csv, 0, nullptr),
        doctest::Contains("version"), std::runtime_error);
  }
}

TEST_CASE("metrics json carries the version and mode blocks") {
  CampaignSummary summary;
  summary.n_trials = 3;
  summary.seed = 9;
  ModeSummary mode;
  mode.label = "filter+terminal";
  mode.n_trials = 3;
  mode.n_success = 2;
  mode.success_percent = 200.0 / 3.0;
  summary.modes.push_back(mode);
  const std::string text = tools::metrics_json(summary);
  const auto doc = nlohmann::json::parse(text);
  CHECK(doc["version"] == "pssf-metrics-v1");
  CHECK(doc["modes"].size() == 1);
  CHECK(doc["modes"][0]["label"] == "filter+terminal");
  CHECK(doc["modes"][0]["outcomes"].contains("loiter"));
}
