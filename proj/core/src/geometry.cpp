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

#include "spba/geometry.hpp"

#include <Eigen/LU>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace spba {

namespace {
constexpr double kPi = std::numbers::pi;
}

Vec6 PoseTwist::to_vector() const {
  Vec6 v;
  v << omega, trans;
  return v;
}

PoseTwist PoseTwist::from_vector(const Vec6& v) {
  return {v.head<3>(), v.tail<3>()};
}

PoseTwist PoseTwist::canonicalized() const {
  const double angle = omega.norm();
  if (angle <= kPi || angle < kSmallAngle) return *this;
  double wrapped = std::fmod(angle, 2.0 * kPi);
  if (wrapped > kPi) wrapped -= 2.0 * kPi;
  return {omega * (wrapped / angle), trans};
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

Mat3 exp_so3(const Vec3& omega) {
  const double angle = omega.norm();
  const Mat3 k = skew(omega);
  double a;  // sin(t)/t
  double b;  // (1-cos(t))/t^2
  if (angle < kSmallAngle) {
    const double t2 = angle * angle;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(angle) / angle;
    b = (1.0 - std::cos(angle)) / (angle * angle);
  }
  return Mat3::Identity() + a * k + b * (k * k);
}

Vec3 log_so3(const Mat3& rotation) {
  const double cos_angle =
      std::clamp((rotation.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double angle = std::acos(cos_angle);
  const Vec3 vee(rotation(2, 1) - rotation(1, 2),
                 rotation(0, 2) - rotation(2, 0),
                 rotation(1, 0) - rotation(0, 1));
  if (angle < 1e-7) {
    return 0.5 * vee;
  }
  if (angle > kPi - 1e-6) {
    // Near pi, vee ~ 0; recover the axis from the symmetric part.
    const Mat3 s = 0.5 * (rotation + Mat3::Identity());
    Vec3 axis;
    int k = 0;
    s.diagonal().maxCoeff(&k);
    axis[k] = std::sqrt(std::max(0.0, s(k, k)));
    const double inv = 1.0 / (2.0 * axis[k]);
    axis[(k + 1) % 3] = (s(k, (k + 1) % 3) + s((k + 1) % 3, k)) * inv;
    axis[(k + 2) % 3] = (s(k, (k + 2) % 3) + s((k + 2) % 3, k)) * inv;
    axis.normalize();
    // Keep the sign consistent with the skew part when it is not exactly 0.
    if (axis.dot(vee) < 0.0) axis = -axis;
    return angle * axis;
  }
  return (angle / (2.0 * std::sin(angle))) * vee;
}

Mat3 so3_right_jacobian(const Vec3& omega) {
  const double angle = omega.norm();
  const Mat3 k = skew(omega);
  double c1;  // (1-cos t)/t^2
  double c2;  // (t-sin t)/t^3
  if (angle < kSmallAngle) {
    const double t2 = angle * angle;
    c1 = 0.5 - t2 / 24.0;
    c2 = 1.0 / 6.0 - t2 / 120.0;
  } else {
    const double t2 = angle * angle;
    c1 = (1.0 - std::cos(angle)) / t2;
    c2 = (angle - std::sin(angle)) / (t2 * angle);
  }
  return Mat3::Identity() - c1 * k + c2 * (k * k);
}

Mat3 exp_so3_jacobian(const Vec3& omega, const Vec3& x) {
  return -exp_so3(omega) * skew(x) * so3_right_jacobian(omega);
}

bool is_rotation_matrix(const Mat3& m, double tol) {
  const double orth = (m.transpose() * m - Mat3::Identity()).norm();
  return orth < tol && std::abs(m.determinant() - 1.0) < tol;
}

RigidTransform transform_of(const PoseTwist& pose) {
  return {exp_so3(pose.omega), pose.trans};
}

RigidTransform compose(const RigidTransform& base,
                       const RigidTransform& delta) {
  return {delta.rotation * base.rotation,
          delta.rotation * base.translation + delta.translation};
}

PoseTwist compose(const PoseTwist& base, const PoseTwist& delta) {
  const RigidTransform t = compose(transform_of(base), transform_of(delta));
  return {log_so3(t.rotation), t.translation};
}

std::optional<Projection> project_camera_point(const Vec3& camera_point,
                                               const CameraIntrinsics& K,
                                               double z_min) {
  const double z = camera_point.z();
  if (!(z > z_min)) return std::nullopt;
  Projection p;
  p.camera_point = camera_point;
  p.depth = z;
  const double inv_z = 1.0 / z;
  p.uv.u = K.fx * camera_point.x() * inv_z + K.cx;
  p.uv.v = K.fy * camera_point.y() * inv_z + K.cy;
  p.jacobian_point << K.fx * inv_z, 0.0, -K.fx * camera_point.x() * inv_z * inv_z,
      0.0, K.fy * inv_z, -K.fy * camera_point.y() * inv_z * inv_z;
  return p;
}

std::optional<PixelCoord> project(const Vec3& x, const PoseTwist& pose,
                                  const CameraIntrinsics& K, double z_min) {
  const auto p = project_camera_point(transform_of(pose).apply(x), K, z_min);
  if (!p) return std::nullopt;
  return p->uv;
}

std::optional<PixelCoord> project_composed(const Vec3& x,
                                           const PoseTwist& base,
                                           const PoseTwist& delta,
                                           const CameraIntrinsics& K,
                                           double z_min) {
  const RigidTransform t = compose(transform_of(base), transform_of(delta));
  const auto p = project_camera_point(t.apply(x), K, z_min);
  if (!p) return std::nullopt;
  return p->uv;
}

std::optional<ProjectionJacobians> project_jacobians(
    const Vec3& x, const PoseTwist& pose, const CameraIntrinsics& K,
    double z_min) {
  const Mat3 rotation = exp_so3(pose.omega);
  const auto p = project_camera_point(rotation * x + pose.trans, K, z_min);
  if (!p) return std::nullopt;
  ProjectionJacobians out;
  out.uv = p->uv;
  out.d_uv_d_omega = p->jacobian_point * exp_so3_jacobian(pose.omega, x);
  out.d_uv_d_trans = p->jacobian_point;
  out.d_uv_d_point = p->jacobian_point * rotation;
  return out;
}

std::optional<ComposedProjectionJacobians> project_composed_jacobians(
    const Vec3& x, const PoseTwist& base, const PoseTwist& delta,
    const CameraIntrinsics& K, double z_min) {
  const Mat3 r0 = exp_so3(base.omega);
  const Mat3 dr = exp_so3(delta.omega);
  const Vec3 xc0 = r0 * x + base.trans;
  const auto p = project_camera_point(dr * xc0 + delta.trans, K, z_min);
  if (!p) return std::nullopt;
  ComposedProjectionJacobians out;
  out.uv = p->uv;
  const Mat23 pd = p->jacobian_point;
  out.d_uv_d_omega0 = pd * dr * exp_so3_jacobian(base.omega, x);
  out.d_uv_d_trans0 = pd * dr;
  out.d_uv_d_domega = pd * exp_so3_jacobian(delta.omega, xc0);
  out.d_uv_d_dtrans = pd;
  out.d_uv_d_point = pd * dr * r0;
  return out;
}

double geodesic_rotation_error_deg(const Mat3& rotation_a,
                                   const Mat3& rotation_b) {
  const double c = std::clamp(
      ((rotation_a.transpose() * rotation_b).trace() - 1.0) * 0.5, -1.0, 1.0);
  return std::acos(c) * 180.0 / kPi;
}

std::string pose_to_json(const PoseTwist& pose) {
  nlohmann::json j;
  j["omega"] = {pose.omega.x(), pose.omega.y(), pose.omega.z()};
  j["trans"] = {pose.trans.x(), pose.trans.y(), pose.trans.z()};
  return j.dump();
}

PoseTwist pose_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  PoseTwist p;
  for (int i = 0; i < 3; ++i) {
    p.omega[i] = j.at("omega").at(i).get<double>();
    p.trans[i] = j.at("trans").at(i).get<double>();
  }
  return p;
}

std::string intrinsics_to_json(const CameraIntrinsics& K) {
  nlohmann::json j;
  j["fx"] = K.fx;
  j["fy"] = K.fy;
  j["cx"] = K.cx;
  j["cy"] = K.cy;
  return j.dump();
}

CameraIntrinsics intrinsics_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  return {j.at("fx").get<double>(), j.at("fy").get<double>(),
          j.at("cx").get<double>(), j.at("cy").get<double>()};
}

}  // namespace spba
