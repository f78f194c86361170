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

#include <vector>

#include "spba/image.hpp"
#include "spba/types.hpp"

namespace spba {

struct DirectionalLight {
  Vec3 direction = Vec3(0, 0, 1);  // direction TOWARD the light, world frame
  double intensity = 1.0;
};

// Lighting is fixed across a sequence, so a point's Lambertian color is
// pose independent by construction.
struct LightingSpec {
  double ambient = 1.0;
  std::vector<DirectionalLight> lights;
};

enum class BackgroundMode { kConstant, kChecker };

struct BackgroundSpec {
  BackgroundMode mode = BackgroundMode::kChecker;
  Vec3 color_a = Vec3(0.66, 0.64, 0.60);
  Vec3 color_b = Vec3(0.42, 0.44, 0.48);
  int checker_cell_px = 2;
};

struct RasterizerOptions {
  double splat_radius_px = 1.5;
  double z_min = kDefaultZMin;
  BackgroundSpec background;
};

struct RenderResult {
  ImageRGB image;
  SilhouetteMask mask;  // pixels covered by any splat
};

// Shaded color of one point: albedo * (ambient + sum_i intensity_i *
// max(0, n.l_i)), clamped to [0, 1]. Depends only on world-frame
// quantities, never the pose.
Vec3 shade_point(const Vec3& albedo, const Vec3& normal,
                 const LightingSpec& lighting);

// Z-buffered point splats of radius splat_radius_px. Per-pixel color is the
// shaded color of the nearest covering point (ties to lowest point index);
// uncovered pixels show the background.
RenderResult rasterize(const PointMatrix& points, const PointAttributes& attrs,
                       const PoseTwist& pose, const CameraIntrinsics& K,
                       int height, int width, const LightingSpec& lighting,
                       const RasterizerOptions& options = {});

}  // namespace spba
