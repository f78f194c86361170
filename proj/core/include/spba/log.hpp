// Copyright 2026 The spba Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <sstream>
#include <string>

namespace spba {

enum class LogLevel { kDebug = 0, kInfo = 1, kWarn = 2, kError = 3 };

void set_log_level(LogLevel level);
LogLevel log_level();
bool set_log_level(const std::string& name);  // "debug", "info", ...

namespace detail {
void log_line(LogLevel level, const std::string& message);
}

template <typename... Args>
void log(LogLevel level, Args&&... args) {
  if (level < log_level()) return;
  std::ostringstream out;
  (out << ... << args);
  detail::log_line(level, out.str());
}

#define SPBA_LOG_DEBUG(...) ::spba::log(::spba::LogLevel::kDebug, __VA_ARGS__)
#define SPBA_LOG_INFO(...) ::spba::log(::spba::LogLevel::kInfo, __VA_ARGS__)
#define SPBA_LOG_WARN(...) ::spba::log(::spba::LogLevel::kWarn, __VA_ARGS__)
#define SPBA_LOG_ERROR(...) ::spba::log(::spba::LogLevel::kError, __VA_ARGS__)

}  // namespace spba
