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
#include <vector>

#include "spba/lbfgs.hpp"
#include "spba/losses.hpp"

namespace spba {

struct OptimizerOptions {
  int history = 10;            // L-BFGS memory m
  int max_outer_rounds = 30;
  int inner_steps = 5;         // K_inner L-BFGS iterations per block
  double delta_l_rel = 1e-3;   // stop when l_total <= delta_l_rel * initial
  double delta_l_abs = 0.0;    // absolute floor on the stop threshold
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  double min_rel_decrease = 1e-5;  // per-step and per-round progress floor
  double grad_tol = 1e-12;
  std::uint64_t seed = 0;      // recorded with the run; the schedule itself
                               // is deterministic and draws nothing
  bool reverse_block_order = false;  // ablation: s, p0, then the dp blocks
};

enum class OptimizeStatus {
  kConverged,      // l_total reached the delta_L threshold
  kSmallProgress,  // a full round improved less than min_rel_decrease
  kStalled,        // every block in a round failed its line search
  kMaxRounds
};

const char* to_string(OptimizeStatus status);

// One row per optimized block, plus the visibility-refresh rows.
struct LossTraceRow {
  int outer_iter = 0;
  std::string block;  // "init", "visibility", "dp_<l>", "p0", "s", ...
  double l_ph = 0.0;
  double l_cd = 0.0;
  double l_total = 0.0;
  long n_point_pairs = 0;
  long n_dropped_oob = 0;
  double grad_norm = 0.0;
};

struct OptimizationState {
  PoseTwist p0;
  std::vector<PoseTwist> dps;  // L - 1 entries
  StyleVector s;
  FrozenVisibility visibility;
  std::vector<LossTraceRow> history;
  int rounds = 0;
  OptimizeStatus status = OptimizeStatus::kMaxRounds;
  long variables_touched = 0;  // 6 (L-1) + 6 + d for the alternating run
  int empty_penalty_frames = 0;  // total silhouette EmptySet penalties seen
};

// Optionally pins variable blocks at their initial values (the "block
// masking" experiments); a pinned block is skipped by the schedule.
struct BlockMask {
  bool optimize_dps = true;
  bool optimize_p0 = true;
  bool optimize_style = true;
};

// Alternating block schedule over {dp_l}, p0, s. Each outer round refreshes
// the frozen visibility from the current state, then runs inner_steps
// L-BFGS iterations per block (dp_1 .. dp_{L-1}, then p0, then s, fresh
// L-BFGS memory each block). Within a round the accepted line-search steps
// never increase l_total; recomputing visibility between rounds may jump
// and is logged as its own trace row.
OptimizationState alternate_optimize(const std::vector<Frame>& frames,
                                     const ShapeGenerator& generator,
                                     const CameraIntrinsics& K,
                                     const OptimizationState& init,
                                     const LossWeights& weights,
                                     const LossOptions& loss_options,
                                     const OptimizerOptions& options,
                                     const BlockMask& mask = {});

struct DirectPointsResult {
  PointMatrix cloud;  // adjusted visible points, untouched invisible ones
  std::vector<LossTraceRow> history;
  int rounds = 0;
  OptimizeStatus status = OptimizeStatus::kMaxRounds;
  long variables_touched = 0;  // 3 * M_p0
  IndexList optimized_indices;
};

// Prior-free baseline: the same losses and outer schedule, but the only
// variables are the 3 * M_p0 coordinates of the points visible from p0 at
// initialization. Poses stay at their given values.
DirectPointsResult optimize_direct_points(const std::vector<Frame>& frames,
                                          const PointMatrix& init_cloud,
                                          const PoseTwist& p0,
                                          const std::vector<PoseTwist>& dps,
                                          const CameraIntrinsics& K,
                                          const LossWeights& weights,
                                          const LossOptions& loss_options,
                                          const OptimizerOptions& options);

}  // namespace spba
