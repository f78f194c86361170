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

#include "spba/optimizer.hpp"
#include "spba/scene.hpp"

namespace spba {

// Rotation and translation are reported separately and never mixed:
// geodesic degrees for rotation, Euclidean world units for translation.
struct TrialSnapshot {
  std::vector<double> rot_err_deg;  // per frame, length L
  std::vector<double> trans_err;    // per frame, world units
  double style_err = 0.0;
  LossBreakdown loss;

  double rot_mean() const;
  double trans_mean() const;
};

struct TrialResult {
  int trial_id = 0;
  std::uint64_t seed = 0;
  int views = 0;                 // L
  std::string loss_option;       // "combined", "photometric", "direct"
  TrialSnapshot init;
  TrialSnapshot final_;
  std::string status;
  int rounds = 0;
  long variables = 0;
  int empty_penalty_frames = 0;
  double wall_time_sec = 0.0;  // logged separately, never in the
                               // deterministic result files
};

// Per-frame pose errors of an estimated (p0, {dp_l}) against the scene's
// ground-truth poses; frame l uses the composed pose p0 o dp_l.
std::vector<double> per_frame_rotation_errors_deg(
    const SceneBundle& scene, const PoseTwist& p0,
    const std::vector<PoseTwist>& dps);
std::vector<double> per_frame_translation_errors(
    const SceneBundle& scene, const PoseTwist& p0,
    const std::vector<PoseTwist>& dps);

struct SuccessCurve {
  std::vector<double> thresholds;  // ascending
  std::vector<double> fraction;    // of errors <= threshold, non-decreasing
};

SuccessCurve success_rate_curve(const std::vector<double>& errors,
                                const std::vector<double>& thresholds);

double median(std::vector<double> values);
double mean(const std::vector<double>& values);

// Trial persistence. The JSON form round trips exactly and excludes wall
// time so identical seeds reproduce identical bytes.
std::string trial_to_json(const TrialResult& trial);
TrialResult trial_from_json(const std::string& text);

void write_trace_csv(const std::string& path,
                     const std::vector<LossTraceRow>& rows);
void write_trials_csv(const std::string& path,
                      const std::vector<TrialResult>& trials);
void write_curve_csv(const std::string& path, const SuccessCurve& curve);

}  // namespace spba
