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

#include <string>

namespace spba {

// Write-temp-then-rename so concurrently running trials never observe a
// partially written file.
void write_file_atomic(const std::string& path, const std::string& bytes);

// Reads the whole file; throws std::runtime_error naming the path when the
// file is missing or unreadable.
std::string read_file(const std::string& path);

bool file_exists(const std::string& path);

void ensure_directory(const std::string& path);

// Formats a double with enough digits to round trip exactly, so identical
// values always serialize to identical text.
std::string format_double(double v);

}  // namespace spba
