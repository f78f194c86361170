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

#include "spba/types.hpp"

namespace spba {

// ASCII PLY with x, y, z, red, green, blue per vertex. Coordinates keep
// full double precision; colors quantize to 8 bits.
void write_ply(const std::string& path, const PointMatrix& points,
               const PointMatrix& albedo);

struct PlyCloud {
  PointMatrix points;
  PointMatrix albedo;  // back in [0, 1]
};

PlyCloud read_ply(const std::string& path);

}  // namespace spba
