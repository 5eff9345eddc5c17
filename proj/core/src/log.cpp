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

#include "pssf/log.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace pssf {

namespace {

std::atomic<int> g_level{-1};
std::mutex g_mutex;

LogLevel level_from_env() {
  const char* env = std::getenv("PSS_LOG");
  if (env == nullptr) return LogLevel::kError;
  if (std::strcmp(env, "debug") == 0) return LogLevel::kDebug;
  if (std::strcmp(env, "info") == 0) return LogLevel::kInfo;
  return LogLevel::kError;
}

void emit(const char* tag, const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::fprintf(stderr, "[pssf %s] %s\n", tag, msg.c_str());
}

}  // namespace

LogLevel log_level() {
  int lvl = g_level.load(std::memory_order_relaxed);
  if (lvl < 0) {
    lvl = static_cast<int>(level_from_env());
    g_level.store(lvl, std::memory_order_relaxed);
  }
  return static_cast<LogLevel>(lvl);
}

void set_log_level(LogLevel level) {
  g_level.store(static_cast<int>(level), std::memory_order_relaxed);
}

void log_error(const std::string& msg) { emit("error", msg); }

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::kInfo) emit("info", msg);
}

void log_debug(const std::string& msg) {
  if (log_level() >= LogLevel::kDebug) emit("debug", msg);
}

}  // namespace pssf
