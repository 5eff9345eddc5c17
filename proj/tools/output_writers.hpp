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

#ifndef PSSF_TOOLS_OUTPUT_WRITERS_HPP_
#define PSSF_TOOLS_OUTPUT_WRITERS_HPP_

#include <string>
#include <vector>

#include "pssf/scenario.hpp"
#include "pssf/simulator.hpp"

namespace pssf::tools {

inline constexpr const char* kTrajectoriesFormatVersion =
    "pssf-trajectories-v1";
inline constexpr const char* kMetricsFormatVersion = "pssf-metrics-v1";

/// `# pssf-trajectories-v1` comment line, CSV header, then one row per
/// (trial, tick, agent). Deterministic down to the byte for fixed inputs.
std::string trajectories_csv(const std::vector<std::vector<TrialResult>>& results,
                             const std::vector<ModeKey>& modes);

/// Campaign summary as versioned JSON.
std::string metrics_json(const CampaignSummary& summary);

/// Parses rows back from the CSV text (used by replay checks).
std::vector<TrajectoryRow> parse_trajectories_csv(const std::string& content,
                                                  int trial, int* n_trials);

}  // namespace pssf::tools

#endif  // PSSF_TOOLS_OUTPUT_WRITERS_HPP_
