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

#include "spba/pseudo_renderer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace spba {

VisibleSet visible_subset(const PointMatrix& cloud, const PoseTwist& pose,
                          const CameraIntrinsics& K, int image_height,
                          int image_width, int upscale, double z_min) {
  if (upscale < 1 || image_height < 1 || image_width < 1) {
    throw std::invalid_argument("visible_subset: bad grid parameters");
  }
  VisibleSet out;
  out.pose = pose;
  out.image_height = image_height;
  out.image_width = image_width;
  out.upscale = upscale;

  const RigidTransform t = transform_of(pose);
  // cell -> (depth, index) of the current winner.
  std::unordered_map<std::int64_t, std::pair<double, int>> cells;
  cells.reserve(cloud.rows());

  for (long i = 0; i < cloud.rows(); ++i) {
    const auto p =
        project_camera_point(t.apply(cloud.row(i).transpose()), K, z_min);
    if (!p) continue;
    if (!(p->uv.u >= 0.0 && p->uv.u < image_width && p->uv.v >= 0.0 &&
          p->uv.v < image_height)) {
      continue;
    }
    const std::int64_t cu = static_cast<std::int64_t>(
        std::floor(p->uv.u * upscale));
    const std::int64_t cv = static_cast<std::int64_t>(
        std::floor(p->uv.v * upscale));
    const std::int64_t cell =
        cv * static_cast<std::int64_t>(image_width) * upscale + cu;
    auto [it, inserted] = cells.try_emplace(
        cell, p->depth, static_cast<int>(i));
    if (!inserted && p->depth < it->second.first) {
      // Strict < keeps the lowest index on exact depth ties (points are
      // visited in ascending index order).
      it->second = {p->depth, static_cast<int>(i)};
    }
  }

  out.indices.reserve(cells.size());
  for (const auto& [cell, winner] : cells) {
    (void)cell;
    out.indices.push_back(winner.second);
  }
  std::sort(out.indices.begin(), out.indices.end());
  return out;
}

bool validate_visible_set(const VisibleSet& set, const PointMatrix& cloud,
                          const CameraIntrinsics& K, double z_min) {
  const RigidTransform t = transform_of(set.pose);
  std::unordered_map<std::int64_t, int> seen;
  int prev = -1;
  for (int i : set.indices) {
    if (i <= prev || i >= cloud.rows()) return false;
    prev = i;
    const auto p =
        project_camera_point(t.apply(cloud.row(i).transpose()), K, z_min);
    if (!p) return false;
    if (!(p->uv.u >= 0.0 && p->uv.u < set.image_width && p->uv.v >= 0.0 &&
          p->uv.v < set.image_height)) {
      return false;
    }
    const std::int64_t cu =
        static_cast<std::int64_t>(std::floor(p->uv.u * set.upscale));
    const std::int64_t cv =
        static_cast<std::int64_t>(std::floor(p->uv.v * set.upscale));
    const std::int64_t cell =
        cv * static_cast<std::int64_t>(set.image_width) * set.upscale + cu;
    if (!seen.emplace(cell, i).second) return false;
  }
  return true;
}

}  // namespace spba
