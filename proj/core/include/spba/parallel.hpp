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

#include <functional>
#include <vector>

namespace spba {

// Runs independent tasks on a bounded worker pool. Tasks must not share
// mutable state. The first exception (by task index) is rethrown after all
// workers finish.
void run_parallel(int jobs, const std::vector<std::function<void()>>& tasks);

}  // namespace spba
