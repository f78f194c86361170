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
#include <optional>
#include <vector>

#include "spba/geometry.hpp"
#include "spba/types.hpp"

namespace spba {

// Pixel convention used everywhere in this project: pixel centers sit at
// integer coordinates, the valid interpolation interior is
// [0, W-1] x [0, H-1], and a point is inside the image iff
// 0 <= u < W and 0 <= v < H.

// H x W x 3 image, row-major, float32 storage in [0, 1]. Math on samples is
// done in double; float32 is the canonical lossless on-disk representation.
struct ImageRGB {
  int height = 0;
  int width = 0;
  std::vector<float> data;  // size H*W*3

  ImageRGB() = default;
  ImageRGB(int h, int w) : height(h), width(w), data(h * w * 3, 0.0f) {}

  float* pixel_ptr(int x, int y) { return data.data() + 3 * (y * width + x); }
  const float* pixel_ptr(int x, int y) const {
    return data.data() + 3 * (y * width + x);
  }
  Vec3 pixel(int x, int y) const {
    const float* p = pixel_ptr(x, y);
    return {p[0], p[1], p[2]};
  }
  void set_pixel(int x, int y, const Vec3& rgb) {
    float* p = pixel_ptr(x, y);
    p[0] = static_cast<float>(rgb[0]);
    p[1] = static_cast<float>(rgb[1]);
    p[2] = static_cast<float>(rgb[2]);
  }
};

struct SilhouetteMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> data;  // 0 or 1, row-major

  SilhouetteMask() = default;
  SilhouetteMask(int h, int w) : height(h), width(w), data(h * w, 0) {}

  bool at(int x, int y) const { return data[y * width + x] != 0; }
  void set(int x, int y, bool v) { data[y * width + x] = v ? 1 : 0; }
  long count() const;
};

// One observation of the sequence.
struct Frame {
  ImageRGB image;
  SilhouetteMask mask;
  PoseTwist gt_pose;  // present for synthetic data
  int index = 0;
};

struct BilinearSample {
  Vec3 rgb;
  Mat32 d_rgb_du;  // exact derivative of the bilinear blend w.r.t. (u, v)
};

// Bilinear blend of the 4 surrounding pixels. Empty when u leaves the valid
// interior [0, W-1] x [0, H-1] (OutOfBounds); the caller must exclude the
// point from the loss for that frame pair.
std::optional<BilinearSample> sample_bilinear(const ImageRGB& image,
                                              const PixelCoord& u);

// One coordinate per true pixel, at pixel centers, row-major order.
std::vector<PixelCoord> mask_to_coords(const SilhouetteMask& mask);

}  // namespace spba
