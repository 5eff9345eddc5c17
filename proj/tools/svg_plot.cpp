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

#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pssf/chance.hpp"
#include "pssf/constraints.hpp"

namespace pssf::tools {

namespace {

constexpr const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b",
                                    "#e377c2", "#17becf"};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

}  // namespace

std::string trajectory_overlay_svg(
    const Scenario& scenario, const std::vector<TrajectoryRow>& trajectory) {
  // Workspace bounding box from axis supports.
  Eigen::VectorXd dir = Eigen::VectorXd::Zero(2);
  dir << 1, 0;
  const double xmax = support(scenario.workspace, dir);
  dir << -1, 0;
  const double xmin = -support(scenario.workspace, dir);
  dir << 0, 1;
  const double ymax = support(scenario.workspace, dir);
  dir << 0, -1;
  const double ymin = -support(scenario.workspace, dir);

  const double size = 640.0;
  const double margin = 40.0;
  const double scale =
      (size - 2 * margin) / std::max(xmax - xmin, ymax - ymin);
  const auto X = [&](double x) { return margin + (x - xmin) * scale; };
  const auto Y = [&](double y) { return size - margin - (y - ymin) * scale; };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << size
      << "' height='" << size << "' viewBox='0 0 " << size << " " << size
      << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<rect x='" << fmt(X(xmin)) << "' y='" << fmt(Y(ymax)) << "' width='"
      << fmt((xmax - xmin) * scale) << "' height='"
      << fmt((ymax - ymin) * scale)
      << "' fill='none' stroke='black' stroke-width='2'/>\n";

  // Tightened keep-in boundary: one-step position covariance, per-wall risk.
  {
    const PredictionModel model =
        PredictionModel::build(scenario.system, scenario.horizon());
    const int walls = scenario.workspace.num_halfspaces();
    const double kappa_wall =
        scenario.risk.per_step_keepin() / walls;
    double pad = 0.0;
    for (int w = 0; w < walls; ++w) {
      const Eigen::VectorXd g =
          scenario.workspace.normals().row(w).transpose();
      const TightenedHalfspace tight = tighten_lower(
          g, scenario.workspace.offsets()(w) -
                 support(scenario.agent_body, g),
          model.cov_pos[1], kappa_wall);
      pad = std::max(pad, scenario.workspace.offsets()(w) - tight.offset);
    }
    svg << "<rect x='" << fmt(X(xmin + pad)) << "' y='" << fmt(Y(ymax - pad))
        << "' width='" << fmt((xmax - xmin - 2 * pad) * scale) << "' height='"
        << fmt((ymax - ymin - 2 * pad) * scale)
        << "' fill='none' stroke='#2ca02c' stroke-width='1' "
           "stroke-dasharray='6 4'/>\n";
  }

  double body_radius = 0.0;
  if (const auto* ball = std::get_if<Ball>(&scenario.agent_body)) {
    body_radius = ball->radius;
  }
  for (const auto& o : scenario.obstacles) {
    double r = 0.0;
    if (const auto* ball = std::get_if<Ball>(&o.shape)) r = ball->radius;
    svg << "<circle cx='" << fmt(X(o.mean_center(0))) << "' cy='"
        << fmt(Y(o.mean_center(1))) << "' r='" << fmt((r + body_radius) * scale)
        << "' fill='#f4c7c3' stroke='none'/>\n";
    svg << "<circle cx='" << fmt(X(o.mean_center(0))) << "' cy='"
        << fmt(Y(o.mean_center(1))) << "' r='" << fmt(r * scale)
        << "' fill='#4d4d4d' stroke='black'/>\n";
  }

  // Paths per agent.
  int max_tick = 0;
  for (const auto& row : trajectory) max_tick = std::max(max_tick, row.tick);
  for (int agent = 0; agent < scenario.n_agents; ++agent) {
    std::ostringstream pts;
    for (const auto& row : trajectory) {
      if (row.agent != agent) continue;
      pts << fmt(X(row.px)) << "," << fmt(Y(row.py)) << " ";
    }
    const char* color = kPalette[agent % 8];
    svg << "<polyline points='" << pts.str() << "' fill='none' stroke='"
        << color << "' stroke-width='1.5'/>\n";
  }
  for (int agent = 0; agent < scenario.n_agents; ++agent) {
    const char* color = kPalette[agent % 8];
    const Eigen::VectorXd p0 = scenario.system.C * scenario.starts[agent];
    svg << "<circle cx='" << fmt(X(p0(0))) << "' cy='" << fmt(Y(p0(1)))
        << "' r='" << fmt(body_radius * scale) << "' fill='none' stroke='"
        << color << "' stroke-width='2'/>\n";
    const Eigen::VectorXd& q = scenario.targets[agent];
    svg << "<circle cx='" << fmt(X(q(0))) << "' cy='" << fmt(Y(q(1)))
        << "' r='" << fmt(0.1 * scale) << "' fill='" << color
        << "' fill-opacity='0.25' stroke='" << color << "'/>\n";
    svg << "<text x='" << fmt(X(q(0))) << "' y='" << fmt(Y(q(1)) + 4)
        << "' font-size='12' text-anchor='middle'>*</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string clearance_svg(const ClearanceSeries& series) {
  const double width = 720.0, height = 360.0, margin = 45.0;
  const int ticks = static_cast<int>(series.agent_pairs.size());
  double lo = 0.0, hi = 0.1;
  for (const auto& row : series.agent_pairs) {
    for (double v : row) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const auto X = [&](double t) {
    return margin + t / std::max(ticks - 1, 1) * (width - 2 * margin);
  };
  const auto Y = [&](double v) {
    return height - margin - (v - lo) / (hi - lo) * (height - 2 * margin);
  };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  // Axes and the zero (collision) line.
  svg << "<line x1='" << fmt(margin) << "' y1='" << fmt(height - margin)
      << "' x2='" << fmt(width - margin) << "' y2='" << fmt(height - margin)
      << "' stroke='black'/>\n";
  svg << "<line x1='" << fmt(margin) << "' y1='" << fmt(margin) << "' x2='"
      << fmt(margin) << "' y2='" << fmt(height - margin)
      << "' stroke='black'/>\n";
  svg << "<line x1='" << fmt(margin) << "' y1='" << fmt(Y(0.0)) << "' x2='"
      << fmt(width - margin) << "' y2='" << fmt(Y(0.0))
      << "' stroke='#d62728' stroke-dasharray='4 4'/>\n";
  svg << "<text x='" << fmt(width / 2) << "' y='" << fmt(height - 8)
      << "' font-size='12' text-anchor='middle'>tick</text>\n";
  svg << "<text x='12' y='" << fmt(margin - 10)
      << "' font-size='12'>clearance [m]</text>\n";

  const std::size_t pairs = series.pair_labels.size();
  for (std::size_t p = 0; p < pairs; ++p) {
    std::ostringstream pts;
    for (int t = 0; t < ticks; ++t) {
      pts << fmt(X(t)) << "," << fmt(Y(series.agent_pairs[t][p])) << " ";
    }
    svg << "<polyline points='" << pts.str() << "' fill='none' stroke='"
        << kPalette[p % 8] << "' stroke-width='1'/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string timing_svg(const std::vector<TimingGroup>& groups,
                       const std::string& x_label) {
  const double width = 720.0, height = 360.0, margin = 50.0;
  double hi = 1e-6;
  for (const auto& g : groups) hi = std::max(hi, g.p95);
  const int n = static_cast<int>(groups.size());
  const double slot = (width - 2 * margin) / std::max(n, 1);
  const auto Y = [&](double v) {
    return height - margin - v / hi * (height - 2 * margin);
  };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<line x1='" << fmt(margin) << "' y1='" << fmt(height - margin)
      << "' x2='" << fmt(width - margin) << "' y2='" << fmt(height - margin)
      << "' stroke='black'/>\n"
      << "<line x1='" << fmt(margin) << "' y1='" << fmt(margin) << "' x2='"
      << fmt(margin) << "' y2='" << fmt(height - margin)
      << "' stroke='black'/>\n";
  svg << "<text x='" << fmt(width / 2) << "' y='" << fmt(height - 8)
      << "' font-size='12' text-anchor='middle'>" << x_label << "</text>\n";
  svg << "<text x='8' y='" << fmt(margin - 10)
      << "' font-size='12'>seconds per tick (5/50/95 pct)</text>\n";

  for (int i = 0; i < n; ++i) {
    const double cx = margin + (i + 0.5) * slot;
    const auto& g = groups[i];
    svg << "<line x1='" << fmt(cx) << "' y1='" << fmt(Y(g.p5)) << "' x2='"
        << fmt(cx) << "' y2='" << fmt(Y(g.p95))
        << "' stroke='#1f77b4' stroke-width='2'/>\n";
    svg << "<rect x='" << fmt(cx - slot * 0.2) << "' y='" << fmt(Y(g.p50) - 2)
        << "' width='" << fmt(slot * 0.4)
        << "' height='4' fill='#d62728'/>\n";
    svg << "<text x='" << fmt(cx) << "' y='" << fmt(height - margin + 16)
        << "' font-size='11' text-anchor='middle'>" << g.label << "</text>\n";
  }
  // y-axis end labels
  svg << "<text x='" << fmt(margin - 4) << "' y='" << fmt(Y(hi) + 4)
      << "' font-size='10' text-anchor='end'>" << fmt(hi) << "</text>\n";
  svg << "<text x='" << fmt(margin - 4) << "' y='" << fmt(Y(0) + 4)
      << "' font-size='10' text-anchor='end'>0</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace pssf::tools
