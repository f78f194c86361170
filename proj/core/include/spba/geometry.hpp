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

#include <optional>
#include <string>

#include "spba/types.hpp"

namespace spba {

// Rotation angle below which Rodrigues terms switch to their Taylor series.
inline constexpr double kSmallAngle = 1e-8;

// Default camera-frame depth guard for the perspective division.
inline constexpr double kDefaultZMin = 1e-4;

// 6-DoF camera extrinsics in exponential-twist form: a rotation of angle
// |omega| around axis omega/|omega|, followed by a translation.
struct PoseTwist {
  Vec3 omega = Vec3::Zero();  // axis-angle, radians
  Vec3 trans = Vec3::Zero();  // world units

  static PoseTwist identity() { return {}; }

  Vec6 to_vector() const;
  static PoseTwist from_vector(const Vec6& v);

  // Wraps the rotation to |omega| <= pi. Applied at input/output boundaries
  // only; the optimizer works on the unwrapped continuous parameterization.
  PoseTwist canonicalized() const;
};

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

struct PixelCoord {
  double u = 0.0;
  double v = 0.0;
};

// Rotation + translation at the matrix level. Pose composition is defined
// once here; the twist-level composition is derived from it.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
};

// Rodrigues formula. Total on finite inputs; small angles use the
// second-order Taylor branch.
Mat3 exp_so3(const Vec3& omega);

// Inverse of exp_so3; returns the canonical axis-angle with |omega| <= pi.
Vec3 log_so3(const Mat3& rotation);

Mat3 skew(const Vec3& v);

// Right Jacobian of SO(3): exp((w + d)^) ~= exp(w^) exp((Jr(w) d)^).
Mat3 so3_right_jacobian(const Vec3& omega);

// d(exp_so3(omega) * x) / d omega, 3x3. Column k is the derivative of the
// rotated point with respect to omega[k].
Mat3 exp_so3_jacobian(const Vec3& omega, const Vec3& x);

bool is_rotation_matrix(const Mat3& m, double tol = 1e-9);

RigidTransform transform_of(const PoseTwist& pose);

// Applies `base` first, then `delta`: R = dR * R0, t = dR * t0 + dt.
RigidTransform compose(const RigidTransform& base, const RigidTransform& delta);
PoseTwist compose(const PoseTwist& base, const PoseTwist& delta);

struct Projection {
  PixelCoord uv;
  double depth = 0.0;      // camera-frame z
  Vec3 camera_point = Vec3::Zero();
  Mat23 jacobian_point;    // d uv / d camera_point
};

// Pinhole projection u = fx*x/z + cx, v = fy*y/z + cy of a camera-frame
// point. Empty when z <= z_min (behind camera).
std::optional<Projection> project_camera_point(const Vec3& camera_point,
                                               const CameraIntrinsics& K,
                                               double z_min = kDefaultZMin);

// pi(x; p) = pinhole(K, R x + t). Empty result means BehindCamera; the
// caller must exclude the point.
std::optional<PixelCoord> project(const Vec3& x, const PoseTwist& pose,
                                  const CameraIntrinsics& K,
                                  double z_min = kDefaultZMin);

// Projection under the composed transform delta ∘ base.
std::optional<PixelCoord> project_composed(const Vec3& x,
                                           const PoseTwist& base,
                                           const PoseTwist& delta,
                                           const CameraIntrinsics& K,
                                           double z_min = kDefaultZMin);

// Analytic Jacobians of the projections with respect to every input block.
struct ProjectionJacobians {
  PixelCoord uv;
  Mat23 d_uv_d_omega;
  Mat23 d_uv_d_trans;
  Mat23 d_uv_d_point;
};

std::optional<ProjectionJacobians> project_jacobians(
    const Vec3& x, const PoseTwist& pose, const CameraIntrinsics& K,
    double z_min = kDefaultZMin);

struct ComposedProjectionJacobians {
  PixelCoord uv;
  Mat23 d_uv_d_omega0;
  Mat23 d_uv_d_trans0;
  Mat23 d_uv_d_domega;
  Mat23 d_uv_d_dtrans;
  Mat23 d_uv_d_point;
};

std::optional<ComposedProjectionJacobians> project_composed_jacobians(
    const Vec3& x, const PoseTwist& base, const PoseTwist& delta,
    const CameraIntrinsics& K, double z_min = kDefaultZMin);

// Smallest rotation angle taking one rotation to the other, in degrees.
double geodesic_rotation_error_deg(const Mat3& rotation_a,
                                   const Mat3& rotation_b);

// JSON (de)serialization: {"omega": [3], "trans": [3]} and
// {"fx","fy","cx","cy"}.
std::string pose_to_json(const PoseTwist& pose);
PoseTwist pose_from_json(const std::string& text);
std::string intrinsics_to_json(const CameraIntrinsics& K);
CameraIntrinsics intrinsics_from_json(const std::string& text);

}  // namespace spba
