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
#include <random>

#include "spba/types.hpp"

namespace spba {

// Deterministic RNG. std::mt19937_64 has a fully specified output sequence;
// the floating point conversions below avoid std::*_distribution, whose
// streams are implementation defined. Identical seeds therefore produce
// bitwise identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via Box-Muller (deterministic, no cached spare).
  double normal();

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Uniform direction on the unit sphere.
  Vec3 unit_vector();

  VecX normal_vector(int n);

 private:
  std::mt19937_64 engine_;
};

// Splits a base seed into an independent per-stream seed. Used so parallel
// trials and sub-stages draw from disjoint deterministic streams.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

}  // namespace spba
