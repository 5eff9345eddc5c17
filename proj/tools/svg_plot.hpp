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

#ifndef PSSF_TOOLS_SVG_PLOT_HPP_
#define PSSF_TOOLS_SVG_PLOT_HPP_

#include <string>
#include <vector>

#include "pssf/scenario.hpp"
#include "pssf/simulator.hpp"

namespace pssf::tools {

/// Workspace overlay: obstacles with agent-radius padding, tightened
/// keep-in boundary, agent paths of one trial, starts and targets.
std::string trajectory_overlay_svg(const Scenario& scenario,
                                   const std::vector<TrajectoryRow>& trajectory);

/// Per-pair inter-agent clearance lines over time; negative means collision.
std::string clearance_svg(const ClearanceSeries& series);

/// (5,50,95) timing percentiles per labelled group, seconds.
struct TimingGroup {
  std::string label;
  double p5 = 0, p50 = 0, p95 = 0;
};
std::string timing_svg(const std::vector<TimingGroup>& groups,
                       const std::string& x_label);

}  // namespace pssf::tools

#endif  // PSSF_TOOLS_SVG_PLOT_HPP_
