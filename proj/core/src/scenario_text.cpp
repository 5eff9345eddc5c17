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

#include "pssf/scenario_text.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace pssf {

namespace {

struct Entry {
  int line;
  std::string value;
};

struct Sections {
  // section -> key -> last value (scalar keys)
  std::map<std::string, std::map<std::string, Entry>> scalars;
  // section -> key -> all values in file order (repeatable keys)
  std::map<std::string, std::map<std::string, std::vector<Entry>>> lists;
};

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const Entry& e, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ScenarioParseError(e.line, what + ": not a number: '" + e.value + "'");
  }
}

std::vector<double> parse_numbers(const Entry& e, const std::string& what) {
  std::istringstream iss(e.value);
  std::vector<double> out;
  std::string token;
  while (iss >> token) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(token, &pos));
      if (pos != token.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw ScenarioParseError(e.line,
                               what + ": not a number: '" + token + "'");
    }
  }
  return out;
}

Sections tokenize(const std::string& content) {
  Sections out;
  std::istringstream iss(content);
  std::string raw;
  std::string section;
  int line_no = 0;
  bool saw_version = false;
  while (std::getline(iss, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (!saw_version) {
      if (line != kScenarioFormatVersion) {
        throw ScenarioParseError(
            line_no, "expected version header '" +
                         std::string(kScenarioFormatVersion) + "', got '" +
                         line + "'");
      }
      saw_version = true;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ScenarioParseError(line_no, "malformed section header");
      }
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ScenarioParseError(line_no, "expected key = value");
    }
    if (section.empty()) {
      throw ScenarioParseError(line_no, "key outside any [section]");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ScenarioParseError(line_no, "empty key or value");
    }
    out.scalars[section][key] = Entry{line_no, value};
    out.lists[section][key].push_back(Entry{line_no, value});
  }
  if (!saw_version) {
    throw ScenarioParseError(0, "missing version header");
  }
  return out;
}

const Entry& require(const Sections& s, const std::string& section,
                     const std::string& key) {
  const auto sec = s.scalars.find(section);
  if (sec == s.scalars.end()) {
    throw ScenarioParseError(0, "missing section [" + section + "]");
  }
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) {
    throw ScenarioParseError(0, "missing key '" + key + "' in [" + section + "]");
  }
  return it->second;
}

std::optional<Entry> lookup(const Sections& s, const std::string& section,
                            const std::string& key) {
  const auto sec = s.scalars.find(section);
  if (sec == s.scalars.end()) return std::nullopt;
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) return std::nullopt;
  return it->second;
}

std::vector<Entry> lookup_list(const Sections& s, const std::string& section,
                               const std::string& key) {
  const auto sec = s.lists.find(section);
  if (sec == s.lists.end()) return {};
  const auto it = sec->second.find(key);
  if (it == sec->second.end()) return {};
  return it->second;
}

}  // namespace

Scenario parse_scenario(const std::string& content) {
  const Sections s = tokenize(content);
  Scenario scn;

  // [system]
  const double ts = parse_double(require(s, "system", "ts"), "ts");
  if (ts <= 0.0) {
    throw ScenarioParseError(require(s, "system", "ts").line, "ts must be > 0");
  }
  scn.system = double_integrator_2d(ts);
  const double sw_pos =
      parse_double(require(s, "system", "sigma_w_pos"), "sigma_w_pos");
  const double sw_vel =
      parse_double(require(s, "system", "sigma_w_vel"), "sigma_w_vel");
  const double se_pos =
      parse_double(require(s, "system", "sigma_eta_pos"), "sigma_eta_pos");
  const double se_vel =
      parse_double(require(s, "system", "sigma_eta_vel"), "sigma_eta_vel");
  for (double v : {sw_pos, sw_vel, se_pos, se_vel}) {
    if (v < 0.0) {
      throw ScenarioParseError(require(s, "system", "sigma_w_pos").line,
                               "noise variances must be nonnegative");
    }
  }
  scn.system.sigma_w = Eigen::Vector4d(sw_pos, sw_pos, sw_vel, sw_vel).asDiagonal();
  scn.system.sigma_eta =
      Eigen::Vector4d(se_pos, se_pos, se_vel, se_vel).asDiagonal();
  const double u_max = parse_double(require(s, "system", "u_max"), "u_max");
  if (u_max <= 0.0) {
    throw ScenarioParseError(require(s, "system", "u_max").line,
                             "u_max must be > 0");
  }
  scn.control_set = ConvexPolytope::centered_box(2, u_max);
  scn.controller = synthesize_controller(
      scn.system, Eigen::MatrixXd::Identity(4, 4),
      Eigen::MatrixXd::Identity(2, 2));

  // [workspace]
  if (const auto box = lookup(s, "workspace", "box")) {
    const auto v = parse_numbers(*box, "workspace box");
    if (v.size() != 4) {
      throw ScenarioParseError(box->line,
                               "workspace box needs xmin ymin xmax ymax");
    }
    if (v[0] >= v[2] || v[1] >= v[3]) {
      throw ScenarioParseError(box->line, "workspace box is inverted");
    }
    scn.workspace = ConvexPolytope::axis_box(Eigen::Vector2d(v[0], v[1]),
                                             Eigen::Vector2d(v[2], v[3]));
  } else {
    const auto rows = lookup_list(s, "workspace", "halfspace");
    if (rows.empty()) {
      throw ScenarioParseError(0, "[workspace] needs box or halfspace rows");
    }
    Eigen::MatrixXd normals(rows.size(), 2);
    Eigen::VectorXd offsets(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto v = parse_numbers(rows[i], "workspace halfspace");
      if (v.size() != 3) {
        throw ScenarioParseError(rows[i].line, "halfspace needs nx ny b");
      }
      if (v[0] == 0.0 && v[1] == 0.0) {
        throw ScenarioParseError(rows[i].line, "halfspace normal is zero");
      }
      normals.row(i) << v[0], v[1];
      offsets(i) = v[2];
    }
    scn.workspace = ConvexPolytope(std::move(normals), std::move(offsets));
  }

  // [agents]
  const double radius =
      parse_double(require(s, "agents", "radius"), "agent radius");
  if (radius < 0.0) {
    throw ScenarioParseError(require(s, "agents", "radius").line,
                             "agent radius must be nonnegative");
  }
  scn.agent_body = Ball(Eigen::Vector2d::Zero(), radius);
  const auto starts = lookup_list(s, "agents", "start");
  const auto targets = lookup_list(s, "agents", "target");
  if (starts.empty()) throw ScenarioParseError(0, "[agents] needs start rows");
  if (starts.size() != targets.size()) {
    throw ScenarioParseError(0, "[agents] start/target row counts differ");
  }
  scn.n_agents = static_cast<int>(starts.size());
  for (const auto& e : starts) {
    const auto v = parse_numbers(e, "agent start");
    if (v.size() != 2 && v.size() != 4) {
      throw ScenarioParseError(e.line, "start needs px py [vx vy]");
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
    x(0) = v[0];
    x(1) = v[1];
    if (v.size() == 4) {
      x(2) = v[2];
      x(3) = v[3];
    }
    scn.starts.push_back(x);
  }
  for (const auto& e : targets) {
    const auto v = parse_numbers(e, "agent target");
    if (v.size() != 2) throw ScenarioParseError(e.line, "target needs px py");
    scn.targets.push_back(Eigen::Vector2d(v[0], v[1]));
  }

  // [obstacles]
  for (const auto& e : lookup_list(s, "obstacles", "obstacle")) {
    const auto v = parse_numbers(e, "obstacle");
    if (v.size() != 4) {
      throw ScenarioParseError(e.line, "obstacle needs cx cy radius cov_diag");
    }
    if (v[2] < 0.0) {
      throw ScenarioParseError(e.line, "obstacle radius must be nonnegative");
    }
    if (v[3] < 0.0) {
      throw ScenarioParseError(e.line,
                               "obstacle center covariance must be nonnegative");
    }
    Obstacle o{Ball(Eigen::Vector2d::Zero(), v[2]),
               Eigen::Vector2d(v[0], v[1]),
               v[3] * Eigen::Matrix2d::Identity()};
    scn.obstacles.push_back(std::move(o));
  }

  // [risk]
  scn.risk.alpha_obstacle = parse_double(require(s, "risk", "alpha"), "alpha");
  scn.risk.beta_agent = parse_double(require(s, "risk", "beta"), "beta");
  scn.risk.kappa_keepin = parse_double(require(s, "risk", "kappa"), "kappa");
  scn.risk.delta_terminal = parse_double(require(s, "risk", "delta"), "delta");
  const Entry& horizon_entry = require(s, "risk", "horizon");
  const double horizon = parse_double(horizon_entry, "horizon");
  if (horizon < 1.0 || horizon != std::floor(horizon)) {
    throw ScenarioParseError(horizon_entry.line,
                             "horizon must be a positive integer");
  }
  scn.risk.horizon = static_cast<int>(horizon);
  try {
    scn.risk.validate();
  } catch (const std::invalid_argument& err) {
    throw ScenarioParseError(horizon_entry.line, err.what());
  }

  // [weights]
  if (const auto lambda = lookup(s, "weights", "lambda")) {
    scn.deviation_weight = parse_double(*lambda, "lambda");
  }
  if (const auto eps = lookup(s, "weights", "mpc_input_penalty")) {
    scn.mpc_input_penalty = parse_double(*eps, "mpc_input_penalty");
  }

  // [policy]
  if (const auto kind = lookup(s, "policy", "kind")) {
    if (kind->value == "baseline-proportional") {
      scn.policy.kind = PolicyKind::kBaselineProportional;
    } else if (kind->value == "potential-field") {
      scn.policy.kind = PolicyKind::kPotentialField;
    } else if (kind->value == "external-rollout") {
      scn.policy.kind = PolicyKind::kExternalRollout;
    } else {
      throw ScenarioParseError(kind->line,
                               "unknown policy kind '" + kind->value + "'");
    }
  }
  if (const auto v = lookup(s, "policy", "k_rep")) {
    scn.policy.potential_field.repulsion_gain = parse_double(*v, "k_rep");
  }
  if (const auto v = lookup(s, "policy", "influence")) {
    scn.policy.potential_field.influence_radius = parse_double(*v, "influence");
  }
  if (const auto v = lookup(s, "policy", "action_max")) {
    scn.policy.potential_field.action_max = parse_double(*v, "action_max");
  }
  if (const auto v = lookup(s, "policy", "epsilon")) {
    scn.policy.potential_field.epsilon = parse_double(*v, "epsilon");
  }
  if (const auto v = lookup(s, "policy", "rollout")) {
    scn.policy.external_rollout_path = v->value;
  }
  if (scn.policy.kind == PolicyKind::kExternalRollout &&
      scn.policy.external_rollout_path.empty()) {
    throw ScenarioParseError(0, "[policy] external-rollout needs rollout=path");
  }

  // [terminal]
  const Entry& vmax_entry = require(s, "terminal", "v_max");
  scn.velocity_bound = parse_double(vmax_entry, "v_max");
  if (scn.velocity_bound <= 0.0) {
    throw ScenarioParseError(vmax_entry.line, "v_max must be > 0");
  }

  try {
    scn.validate();
  } catch (const std::invalid_argument& err) {
    throw ScenarioParseError(0, err.what());
  }
  return scn;
}

std::string serialize_scenario(const Scenario& scn) {
  std::ostringstream out;
  out.precision(17);
  out << kScenarioFormatVersion << "\n\n[system]\n";
  out << "ts = " << scn.system.ts << "\n";
  out << "sigma_w_pos = " << scn.system.sigma_w(0, 0) << "\n";
  out << "sigma_w_vel = " << scn.system.sigma_w(2, 2) << "\n";
  out << "sigma_eta_pos = " << scn.system.sigma_eta(0, 0) << "\n";
  out << "sigma_eta_vel = " << scn.system.sigma_eta(2, 2) << "\n";
  out << "u_max = " << scn.control_set.offsets()(0) << "\n";

  out << "\n[workspace]\n";
  for (int i = 0; i < scn.workspace.num_halfspaces(); ++i) {
    out << "halfspace = " << scn.workspace.normals()(i, 0) << " "
        << scn.workspace.normals()(i, 1) << " " << scn.workspace.offsets()(i)
        << "\n";
  }

  out << "\n[agents]\n";
  out << "radius = " << std::get<Ball>(scn.agent_body).radius << "\n";
  for (const auto& x : scn.starts) {
    out << "start = " << x(0) << " " << x(1) << " " << x(2) << " " << x(3)
        << "\n";
  }
  for (const auto& q : scn.targets) {
    out << "target = " << q(0) << " " << q(1) << "\n";
  }

  out << "\n[obstacles]\n";
  for (const auto& o : scn.obstacles) {
    out << "obstacle = " << o.mean_center(0) << " " << o.mean_center(1) << " "
        << std::get<Ball>(o.shape).radius << " " << o.center_cov(0, 0) << "\n";
  }

  out << "\n[risk]\n";
  out << "alpha = " << scn.risk.alpha_obstacle << "\n";
  out << "beta = " << scn.risk.beta_agent << "\n";
  out << "kappa = " << scn.risk.kappa_keepin << "\n";
  out << "delta = " << scn.risk.delta_terminal << "\n";
  out << "horizon = " << scn.risk.horizon << "\n";

  out << "\n[weights]\n";
  out << "lambda = " << scn.deviation_weight << "\n";
  out << "mpc_input_penalty = " << scn.mpc_input_penalty << "\n";

  out << "\n[policy]\n";
  switch (scn.policy.kind) {
    case PolicyKind::kBaselineProportional:
      out << "kind = baseline-proportional\n";
      break;
    case PolicyKind::kPotentialField:
      out << "kind = potential-field\n";
      break;
    case PolicyKind::kExternalRollout:
      out << "kind = external-rollout\n";
      out << "rollout = " << scn.policy.external_rollout_path << "\n";
      break;
  }
  const auto& pf = scn.policy.potential_field;
  out << "k_rep = " << pf.repulsion_gain << "\n";
  out << "influence = " << pf.influence_radius << "\n";
  out << "action_max = " << pf.action_max << "\n";
  out << "epsilon = " << pf.epsilon << "\n";

  out << "\n[terminal]\n";
  out << "v_max = " << scn.velocity_bound << "\n";
  return out.str();
}

}  // namespace pssf
