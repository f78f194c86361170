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

#include "spba/image.hpp"

#include <algorithm>
#include <cmath>

namespace spba {

long SilhouetteMask::count() const {
  long n = 0;
  for (auto v : data) n += (v != 0);
  return n;
}

std::optional<BilinearSample> sample_bilinear(const ImageRGB& image,
                                              const PixelCoord& u) {
  const double w_max = static_cast<double>(image.width - 1);
  const double h_max = static_cast<double>(image.height - 1);
  if (!(u.u >= 0.0 && u.u <= w_max && u.v >= 0.0 && u.v <= h_max)) {
    return std::nullopt;
  }
  // Clamp the cell so u == W-1 lands in the last cell with fu == 1.
  int x0 = static_cast<int>(std::floor(u.u));
  int y0 = static_cast<int>(std::floor(u.v));
  x0 = std::min(x0, image.width - 2);
  y0 = std::min(y0, image.height - 2);
  const double fu = u.u - x0;
  const double fv = u.v - y0;

  const Vec3 c00 = image.pixel(x0, y0);
  const Vec3 c10 = image.pixel(x0 + 1, y0);
  const Vec3 c01 = image.pixel(x0, y0 + 1);
  const Vec3 c11 = image.pixel(x0 + 1, y0 + 1);

  BilinearSample out;
  out.rgb = (1.0 - fu) * (1.0 - fv) * c00 + fu * (1.0 - fv) * c10 +
            (1.0 - fu) * fv * c01 + fu * fv * c11;
  out.d_rgb_du.col(0) = (1.0 - fv) * (c10 - c00) + fv * (c11 - c01);
  out.d_rgb_du.col(1) = (1.0 - fu) * (c01 - c00) + fu * (c11 - c10);
  return out;
}

std::vector<PixelCoord> mask_to_coords(const SilhouetteMask& mask) {
  std::vector<PixelCoord> coords;
  coords.reserve(static_cast<std::size_t>(mask.count()));
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) {
        coords.push_back({static_cast<double>(x), static_cast<double>(y)});
      }
    }
  }
  return coords;
}

}  // namespace spba
