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

#include "output_writers.hpp"

#include <json.hpp>
#include <cinttypes>
#include <cstdio>
#include <sstream>

namespace pssf::tools {

namespace {

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::string trajectories_csv(
    const std::vector<std::vector<TrialResult>>& results,
    const std::vector<ModeKey>& modes) {
  std::ostringstream out;
  out << "# " << kTrajectoriesFormatVersion << "\n";
  out << "trial,tick,agent,px,py,vx,vy,ux,uy,mode,degraded\n";
  for (std::size_t m = 0; m < results.size(); ++m) {
    const std::string label = to_string(modes[m].mode);
    for (std::size_t trial = 0; trial < results[m].size(); ++trial) {
      for (const auto& row : results[m][trial].trajectory) {
        out << trial << "," << row.tick << "," << row.agent << ","
            << fmt_double(row.px) << "," << fmt_double(row.py) << ","
            << fmt_double(row.vx) << "," << fmt_double(row.vy) << ","
            << fmt_double(row.ux) << "," << fmt_double(row.uy) << "," << label
            << "," << (row.degraded ? 1 : 0) << "\n";
      }
    }
  }
  return out.str();
}

std::string metrics_json(const CampaignSummary& summary) {
  nlohmann::ordered_json doc;
  doc["version"] = kMetricsFormatVersion;
  doc["seed"] = summary.seed;
  doc["trials"] = summary.n_trials;
  doc["modes"] = nlohmann::ordered_json::array();
  for (const auto& mode : summary.modes) {
    nlohmann::ordered_json j;
    j["label"] = mode.label;
    j["success_percent"] = mode.success_percent;
    const auto pct = [](const std::array<double, 3>& p) {
      return nlohmann::ordered_json{{"p5", p[0]}, {"p50", p[1]}, {"p95", p[2]}};
    };
    j["completion_ticks"] = pct(mode.completion_ticks);
    j["min_obstacle_separation"] = pct(mode.min_obstacle_separation);
    j["min_agent_separation"] = pct(mode.min_agent_separation);
    j["setup_seconds"] = pct(mode.setup_seconds);
    j["solve_seconds"] = pct(mode.solve_seconds);
    j["tick_seconds"] = pct(mode.tick_seconds);
    nlohmann::ordered_json outcomes;
    for (int k = 0; k < 6; ++k) {
      outcomes[to_string(static_cast<TrialOutcome>(k))] =
          mode.outcome_counts[k];
    }
    j["outcomes"] = outcomes;
    j["degraded_ticks"] = mode.degraded_ticks;
    j["safety"] = {
        {"obstacle_samples", mode.tallies.obstacle_samples},
        {"obstacle_events", mode.tallies.obstacle_events},
        {"agent_samples", mode.tallies.agent_samples},
        {"agent_events", mode.tallies.agent_events},
        {"keepin_samples", mode.tallies.keepin_samples},
        {"keepin_events", mode.tallies.keepin_events},
    };
    j["kkt"] = {
        {"max_stationarity", mode.max_kkt_stationarity},
        {"max_primal", mode.max_kkt_primal},
        {"max_complementarity", mode.max_kkt_complementarity},
    };
    doc["modes"].push_back(j);
  }
  return doc.dump(2) + "\n";
}

std::vector<TrajectoryRow> parse_trajectories_csv(const std::string& content,
                                                  int trial, int* n_trials) {
  std::istringstream in(content);
  std::string line;
  if (!std::getline(in, line) ||
      line != std::string("# ") + kTrajectoriesFormatVersion) {
    throw std::runtime_error("trajectories.csv: version header mismatch");
  }
  if (!std::getline(in, line) ||
      line != "trial,tick,agent,px,py,vx,vy,ux,uy,mode,degraded") {
    throw std::runtime_error("trajectories.csv: column header mismatch");
  }
  std::vector<TrajectoryRow> rows;
  int max_trial = -1;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TrajectoryRow row;
    int row_trial = 0, degraded = 0;
    char mode_buf[32] = {0};
    const int got = std::sscanf(
        line.c_str(), "%d,%d,%d,%lf,%lf,%lf,%lf,%lf,%lf,%31[^,],%d",
        &row_trial, &row.tick, &row.agent, &row.px, &row.py, &row.vx, &row.vy,
        &row.ux, &row.uy, mode_buf, &degraded);
    if (got != 11) {
      throw std::runtime_error("trajectories.csv: malformed row: " + line);
    }
    row.degraded = degraded != 0;
    max_trial = std::max(max_trial, row_trial);
    if (row_trial == trial) rows.push_back(row);
  }
  if (n_trials != nullptr) *n_trials = max_trial + 1;
  return rows;
}

}  // namespace pssf::tools
