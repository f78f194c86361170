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

#include "spba/evaluation.hpp"
#include "spba/scene.hpp"

namespace spba {

enum class LossOption { kCombined, kPhotometricOnly };

const char* to_string(LossOption option);

struct PipelineResult {
  TrialResult trial;
  Initialization initialization;
  PoseTwist final_p0;
  std::vector<PoseTwist> final_dps;
  StyleVector final_style;
  PointMatrix recovered_cloud;
  std::vector<LossTraceRow> trace;
};

// initialize -> alternate_optimize -> metrics. The trial's loss breakdowns
// use the option's weights, so final l_total <= init l_total holds per run;
// l_cd always carries the unweighted Chamfer value for cross-option
// comparison.
PipelineResult run_pipeline(const SceneBundle& scene,
                            const ShapePriorBundle& prior,
                            const ExperimentConfig& config,
                            LossOption option);

// Prior-free baseline for the same scene and the same initialization:
// poses stay at their initial values and only the initially visible point
// coordinates move. loss_option is "direct".
PipelineResult run_direct_pipeline(const SceneBundle& scene,
                                   const ShapePriorBundle& prior,
                                   const ExperimentConfig& config);

// Persists result.json, trace.csv, recovered_cloud.ply and poses.json
// (plus timing.json, which is excluded from determinism comparisons).
// Refuses to overwrite an existing trial unless force.
void save_trial(const std::string& dir, const PipelineResult& result,
                bool force);

// Loads a scene directory, runs the pipeline and persists the trial.
// A truncated scene directory fails with an error naming the missing file.
PipelineResult run_trial_to_dir(const std::string& scene_dir,
                                const ShapePriorBundle& prior,
                                const ExperimentConfig& config,
                                LossOption option, const std::string& out_dir,
                                bool force);

}  // namespace spba
