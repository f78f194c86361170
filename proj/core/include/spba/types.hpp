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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <vector>

namespace spba {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using VecX = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using Mat23 = Eigen::Matrix<double, 2, 3>;
using Mat32 = Eigen::Matrix<double, 3, 2>;
using MatX = Eigen::MatrixXd;

// N x 3 point set, one point per row. Row index is a persistent point
// identity across generator calls.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

using IndexList = std::vector<int>;

// Per-point surface attributes, index-aligned with a PointMatrix. Attached
// at sampling time; they follow the point rigidly through style deformation.
struct PointAttributes {
  PointMatrix albedo;   // rgb in [0, 1]
  PointMatrix normals;  // unit, world frame (canonical pose)
};

}  // namespace spba
