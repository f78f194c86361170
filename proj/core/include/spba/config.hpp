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

#include "spba/optimizer.hpp"
#include "spba/procedural.hpp"
#include "spba/rasterizer.hpp"

namespace spba {

inline constexpr int kConfigVersion = 1;

struct PriorConfig {
  int style_dims = 8;       // d
  int points = 2048;        // N
  int train_shapes = 200;
  ShapeFamily family = ShapeFamily::standard();
};

struct CameraConfig {
  int width = 128;
  int height = 128;
  double fov_deg = 50.0;      // horizontal field of view -> fx = fy
  double distance_lo = 3.2;   // camera distance range, world units
  double distance_hi = 4.2;
  double z_min = kDefaultZMin;

  CameraIntrinsics intrinsics() const;
};

struct SequenceConfig {
  int frames = 15;        // L
  double step_deg = 2.0;  // per-frame rotation about the sampled axis
};

struct RenderConfig {
  double splat_radius_px = 1.5;
  BackgroundSpec background;
  int lights_lo = 1;
  int lights_hi = 3;
  double ambient_lo = 0.25;
  double ambient_hi = 0.40;
  double intensity_lo = 0.35;
  double intensity_hi = 0.70;
  double contrast_lo = 0.15;  // per-scene object texture contrast range;
  double contrast_hi = 1.0;   // low contrast scenes are degenerate-prone
  double coverage_lo = 0.10;  // accepted mask coverage for the reference pose
  double coverage_hi = 0.80;
};

struct InitNoiseConfig {
  double rot_sigma_deg = 10.0;  // |N(0, sigma)| rotation about a random axis
  double trans_sigma_frac = 0.05;  // of the scene camera distance, per axis
  double style_sigma_frac = 0.5;   // of each per-mode scale
};

struct ExperimentConfig {
  int config_version = kConfigVersion;
  PriorConfig prior;
  CameraConfig camera;
  SequenceConfig sequence;
  RenderConfig render;
  InitNoiseConfig init_noise;
  LossWeights weights;
  LossOptions loss;
  OptimizerOptions optimizer;
  std::uint64_t seed = 1;

  void validate() const;  // throws std::invalid_argument with the field name
};

std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
void save_config(const std::string& path, const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

}  // namespace spba
