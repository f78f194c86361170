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

#include "spba/pipeline.hpp"

namespace spba {

// Scenes are synthesized at the longest view count and truncated, so each
// row of an ablation evaluates the same underlying scenes.
SceneBundle truncate_scene(const SceneBundle& scene, int views);

struct AblationRow {
  int views = 0;
  int trials = 0;
  double median_rot_init_deg = 0.0;
  double median_rot_final_deg = 0.0;
  double mean_rot_final_deg = 0.0;
  double median_style_init = 0.0;
  double median_style_final = 0.0;
};

struct AblationResult {
  std::vector<AblationRow> rows;
  std::vector<TrialResult> trials;
};

// Runs the full pipeline on every scene truncated to each view count
// (paired seeds across counts).
AblationResult views_ablation(const std::vector<SceneBundle>& scenes,
                              const ShapePriorBundle& prior,
                              const ExperimentConfig& config,
                              const std::vector<int>& view_counts,
                              LossOption option, int jobs);

void write_ablation_csv(const std::string& path,
                        const std::vector<AblationRow>& rows);
void write_ablation_svg(const std::string& rot_path,
                        const std::string& style_path,
                        const std::vector<AblationRow>& rows);

struct PairedTrials {
  std::vector<TrialResult> first;
  std::vector<TrialResult> second;
};

// Each scene run once per loss option with identical initialization.
PairedTrials compare_loss_options(const std::vector<SceneBundle>& scenes,
                                  const ShapePriorBundle& prior,
                                  const ExperimentConfig& config, int jobs);

// Prior-based optimization vs direct point optimization, identical
// initialization per scene.
PairedTrials compare_prior_vs_direct(const std::vector<SceneBundle>& scenes,
                                     const ShapePriorBundle& prior,
                                     const ExperimentConfig& config, int jobs);

}  // namespace spba
