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

#include <cstdint>
#include <string>
#include <vector>

namespace spba {

// One finite-difference suite: analytic gradients of an operation checked
// against central differences on randomized instances. Instances keep every
// sample away from the non-smooth loci (pixel cell lines, the drop
// boundaries, nearest-neighbor ties), where a derivative comparison is
// meaningless; visibility is frozen per instance.
struct GradcheckSuite {
  std::string name;
  int instances = 0;
  double max_rel_err = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  double seconds = 0.0;
};

std::vector<GradcheckSuite> run_gradcheck(std::uint64_t seed,
                                          int instances_per_suite = 1000);

bool all_pass(const std::vector<GradcheckSuite>& suites);

std::string format_gradcheck_table(const std::vector<GradcheckSuite>& suites);

}  // namespace spba
