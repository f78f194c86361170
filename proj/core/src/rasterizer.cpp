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

#include "spba/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spba {

Vec3 shade_point(const Vec3& albedo, const Vec3& normal,
                 const LightingSpec& lighting) {
  double gain = lighting.ambient;
  for (const auto& light : lighting.lights) {
    gain += light.intensity * std::max(0.0, normal.dot(light.direction));
  }
  return (albedo * gain).cwiseMin(1.0).cwiseMax(0.0);
}

RenderResult rasterize(const PointMatrix& points, const PointAttributes& attrs,
                       const PoseTwist& pose, const CameraIntrinsics& K,
                       int height, int width, const LightingSpec& lighting,
                       const RasterizerOptions& options) {
  const long n = points.rows();
  if (n == 0) throw std::invalid_argument("rasterize: empty point cloud");
  if (attrs.albedo.rows() != n || attrs.normals.rows() != n) {
    throw std::invalid_argument("rasterize: attribute size mismatch");
  }

  RenderResult out;
  out.image = ImageRGB(height, width);
  out.mask = SilhouetteMask(height, width);

  const auto& bg = options.background;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (bg.mode == BackgroundMode::kChecker) {
        const int parity =
            ((x / bg.checker_cell_px) + (y / bg.checker_cell_px)) & 1;
        out.image.set_pixel(x, y, parity ? bg.color_b : bg.color_a);
      } else {
        out.image.set_pixel(x, y, bg.color_a);
      }
    }
  }

  std::vector<double> zbuf(static_cast<std::size_t>(height) * width,
                           std::numeric_limits<double>::infinity());
  std::vector<int> owner(zbuf.size(), -1);

  const RigidTransform t = transform_of(pose);
  const double r = options.splat_radius_px;
  const double r2 = r * r;

  for (long i = 0; i < n; ++i) {
    const auto p = project_camera_point(t.apply(points.row(i).transpose()), K,
                                        options.z_min);
    if (!p) continue;
    const int x_lo = std::max(0, static_cast<int>(std::ceil(p->uv.u - r)));
    const int x_hi =
        std::min(width - 1, static_cast<int>(std::floor(p->uv.u + r)));
    const int y_lo = std::max(0, static_cast<int>(std::ceil(p->uv.v - r)));
    const int y_hi =
        std::min(height - 1, static_cast<int>(std::floor(p->uv.v + r)));
    for (int y = y_lo; y <= y_hi; ++y) {
      const double dv = y - p->uv.v;
      for (int x = x_lo; x <= x_hi; ++x) {
        const double du = x - p->uv.u;
        if (du * du + dv * dv > r2) continue;
        const std::size_t idx = static_cast<std::size_t>(y) * width + x;
        // Lowest index wins depth ties for platform independence.
        if (p->depth < zbuf[idx] ||
            (p->depth == zbuf[idx] && static_cast<int>(i) < owner[idx])) {
          zbuf[idx] = p->depth;
          owner[idx] = static_cast<int>(i);
        }
      }
    }
  }

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int i = owner[static_cast<std::size_t>(y) * width + x];
      if (i < 0) continue;
      out.mask.set(x, y, true);
      out.image.set_pixel(
          x, y,
          shade_point(attrs.albedo.row(i).transpose(),
                      attrs.normals.row(i).transpose(), lighting));
    }
  }
  return out;
}

}  // namespace spba
