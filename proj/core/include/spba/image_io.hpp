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

#include "spba/image.hpp"

namespace spba {

// 8-bit RGB PNG, for inspection only. Values are quantized round(v * 255);
// computations always reload the float32 .raw originals.
void write_png(const std::string& path, const ImageRGB& image);
ImageRGB read_png(const std::string& path);

// Lossless float32 image as an NPY array of shape (H, W, 3), dtype '<f4'.
// Round trips are bit exact.
void write_image_raw(const std::string& path, const ImageRGB& image);
ImageRGB read_image_raw(const std::string& path);

// Binary PGM (P5), 0 = background, 255 = silhouette.
void write_pgm(const std::string& path, const SilhouetteMask& mask);
SilhouetteMask read_pgm(const std::string& path);

}  // namespace spba
