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

#ifndef PSSF_SCENARIO_TEXT_HPP_
#define PSSF_SCENARIO_TEXT_HPP_

#include <string>

#include "pssf/scenario.hpp"

namespace pssf {

/// Parse or schema failure; `line` is 1-based, 0 when not line-specific.
struct ScenarioParseError : std::runtime_error {
  ScenarioParseError(int line_number, const std::string& message)
      : std::runtime_error(line_number > 0
                               ? "line " + std::to_string(line_number) + ": " +
                                     message
                               : message),
        line(line_number) {}
  int line;
};

inline constexpr const char* kScenarioFormatVersion = "pssf-scenario-v1";

/// Parses the line-oriented scenario format (sections + key=value pairs,
/// `#` comments, version header first). Controller gains are synthesized,
/// and Scenario::validate() is run before returning.
Scenario parse_scenario(const std::string& content);

/// Canonical text form; parse(serialize(s)) reproduces s.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace pssf

#endif  // PSSF_SCENARIO_TEXT_HPP_
