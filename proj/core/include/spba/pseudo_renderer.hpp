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

#include "spba/geometry.hpp"
#include "spba/types.hpp"

namespace spba {

// Indices of the points visible from a pose: projected into an up-scaled
// grid, at most one survivor per cell (the one nearest the camera).
struct VisibleSet {
  IndexList indices;  // unique, sorted ascending
  PoseTwist pose;
  int image_height = 0;
  int image_width = 0;
  int upscale = 1;
};

// Visibility selection: points behind the camera or outside
// [0, W) x [0, H) are dropped; survivors are binned by floor of the
// up-scaled pixel coordinates into a (U*H) x (U*W) grid and max-pooled on
// inverse depth (ties to lowest point index). Selection is
// non-differentiable and is held fixed within each gradient evaluation.
VisibleSet visible_subset(const PointMatrix& cloud, const PoseTwist& pose,
                          const CameraIntrinsics& K, int image_height,
                          int image_width, int upscale,
                          double z_min = kDefaultZMin);

// Independent re-check of the VisibleSet invariants (unique sorted
// indices, in-bounds in-front projections, one index per up-scaled cell).
bool validate_visible_set(const VisibleSet& set, const PointMatrix& cloud,
                          const CameraIntrinsics& K,
                          double z_min = kDefaultZMin);

}  // namespace spba
