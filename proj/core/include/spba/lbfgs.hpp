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
#include <string>

#include "spba/types.hpp"

namespace spba {

// Evaluates f(x); writes df/dx into *grad when grad != nullptr.
using Objective = std::function<double(const VecX& x, VecX* grad)>;

struct LbfgsOptions {
  int history = 10;           // curvature pairs kept (m)
  int max_iterations = 100;
  double grad_tol = 1e-10;    // terminate when ||grad||_inf < grad_tol
  double min_rel_decrease = 0.0;  // terminate when (f_k - f_k+1) /
                                  // max(1, |f_k|) falls below this
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  int max_line_search_evals = 12;
  // Length of the very first trial step (no curvature information yet).
  // The bracketing phase doubles from here, so this only sets the floor of
  // the first expansion, not a step-size ceiling.
  double first_step_length = 0.1;
};

enum class LbfgsStatus {
  kGradientConverged,
  kSmallDecrease,
  kMaxIterations,
  kLineSearchFailed,   // best point so far returned, flagged
  kNonFiniteObjective  // objective not finite at x0
};

struct LbfgsResult {
  VecX x;
  double value = 0.0;
  double grad_norm = 0.0;  // infinity norm at x
  int iterations = 0;
  int evaluations = 0;
  LbfgsStatus status = LbfgsStatus::kMaxIterations;
};

const char* to_string(LbfgsStatus status);

// Two-loop-recursion L-BFGS with a strong-Wolfe line search. Never returns
// a point with higher objective than x0.
LbfgsResult lbfgs_minimize(const Objective& objective, const VecX& x0,
                           const LbfgsOptions& options);

}  // namespace spba
