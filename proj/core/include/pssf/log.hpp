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

#ifndef PSSF_LOG_HPP_
#define PSSF_LOG_HPP_

#include <string>

namespace pssf {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

/// Global log level; initialized from the PSS_LOG environment variable
/// ("error", "info", "debug") on first use. Defaults to error.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_error(const std::string& msg);
void log_info(const std::string& msg);
void log_debug(const std::string& msg);

}  // namespace pssf

#endif  // PSSF_LOG_HPP_
