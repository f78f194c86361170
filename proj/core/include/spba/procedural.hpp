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

#include <array>
#include <cstdint>
#include <string>

#include "spba/types.hpp"

namespace spba {

// Car-like composite solid: a superellipsoid body centered at the origin, a
// cabin superellipsoid on top, and four wheel cylinders. x is the lateral
// (mirror) axis, y the longitudinal axis, z up.
enum ShapeParam : int {
  kBodyLength = 0,
  kBodyWidth = 1,
  kBodyHeight = 2,
  kCabinOffset = 3,
  kCabinHeight = 4,
  kBodyTaper = 5,
  kCabinTaper = 6,
  kWheelRadius = 7,
  kNumShapeParams = 8,
};

// Declared [lo, hi] bound per parameter. The bounds are part of the family
// identity: sample allocation across surface patches is derived from the
// midpoint geometry, so every member of one family shares the same
// point-index-to-surface-location correspondence.
struct ShapeFamily {
  std::array<double, kNumShapeParams> lo{};
  std::array<double, kNumShapeParams> hi{};

  static ShapeFamily standard();

  VecX midpoint() const;
  bool contains(const VecX& params) const;
  VecX clamp(const VecX& params) const;
};

struct ProceduralCloud {
  PointMatrix points;
  PointAttributes attrs;
};

// Deterministically samples n points approximately uniformly (area weighted
// at the family midpoint) on the composite surface. The same (family, n,
// seed) reuses the same surface parameterization for every params vector,
// which is what makes PCA over the family well posed. Points come in
// mirror pairs, so symmetric geometry yields an x -> -x symmetric cloud.
// Albedo is a deterministic procedural texture over the parameterization;
// normals are the exact surface normals at the given params.
ProceduralCloud sample_procedural_shape(const ShapeFamily& family,
                                        const VecX& params, int n,
                                        std::uint64_t seed);

}  // namespace spba
