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

#include "spba/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "spba/nn_grid.hpp"

namespace spba {

namespace {

// Cached per-pose quantities shared by every point of one term.
struct PoseCache {
  Mat3 rotation;
  Mat3 right_jacobian;
  Vec3 translation;
};

PoseCache cache_pose(const PoseTwist& pose) {
  return {exp_so3(pose.omega), so3_right_jacobian(pose.omega), pose.trans};
}

Vec2 to_vec(const PixelCoord& u) { return {u.u, u.v}; }

bool inside_bilinear(const PixelCoord& u, int height, int width) {
  return u.u >= 0.0 && u.u <= width - 1.0 && u.v >= 0.0 && u.v <= height - 1.0;
}

}  // namespace

FrozenVisibility compute_visibility(const PointMatrix& cloud,
                                    const PoseTwist& p0,
                                    const std::vector<PoseTwist>& dps,
                                    const CameraIntrinsics& K,
                                    int image_height, int image_width,
                                    const LossOptions& options) {
  FrozenVisibility out;
  out.reference = visible_subset(cloud, p0, K, image_height, image_width,
                                 options.upscale, options.z_min);
  out.targets.reserve(dps.size());
  for (const auto& dp : dps) {
    if (options.silhouette_visibility == SilhouetteVisibility::kTargetPose) {
      out.targets.push_back(visible_subset(cloud, compose(p0, dp), K,
                                           image_height, image_width,
                                           options.upscale, options.z_min));
    } else {
      out.targets.push_back(out.reference);
    }
  }
  return out;
}

ShapeGenerator make_generator(const LinearShapePrior& prior) {
  ShapeGenerator g;
  g.forward = [&prior](const StyleVector& s) { return generate(prior, s); };
  g.backward = [&prior](const StyleVector& s, const PointMatrix& grad,
                        const IndexList* active) {
    return generate_backward(prior, s, grad, active);
  };
  g.dims = prior.dims();
  g.n_points = prior.point_count();
  return g;
}

ShapeGenerator make_generator(const MlpShapePrior& prior) {
  ShapeGenerator g;
  g.forward = [&prior](const StyleVector& s) { return generate(prior, s); };
  g.backward = [&prior](const StyleVector& s, const PointMatrix& grad,
                        const IndexList* active) {
    return generate_backward(prior, s, grad, active);
  };
  g.dims = prior.dims();
  g.n_points = prior.point_count();
  return g;
}

PhotometricPairResult photometric_pair_term(
    const Frame& reference, const Frame& target, const PoseTwist& p0,
    const PoseTwist& dp, const PointMatrix& cloud, const VisibleSet& visible,
    const CameraIntrinsics& K, double z_min, const TermRequest& request,
    PointMatrix* grad_points) {
  PhotometricPairResult out;
  const PoseCache base = cache_pose(p0);
  const PoseCache delta = cache_pose(dp);

  Vec3 acc_w0 = Vec3::Zero();   // sum of x cross (R0^T g_xc0)
  Vec3 acc_t0 = Vec3::Zero();
  Vec3 acc_dw = Vec3::Zero();   // sum of xc0 cross (dR^T g_xcl)
  Vec3 acc_dt = Vec3::Zero();

  const int h = reference.image.height;
  const int w = reference.image.width;

  for (int i : visible.indices) {
    const Vec3 x = cloud.row(i).transpose();
    const Vec3 xc0 = base.rotation * x + base.translation;
    const auto proj0 = project_camera_point(xc0, K, z_min);
    if (!proj0 || !inside_bilinear(proj0->uv, h, w)) {
      ++out.dropped;
      continue;
    }
    const Vec3 xcl = delta.rotation * xc0 + delta.translation;
    const auto projl = project_camera_point(xcl, K, z_min);
    if (!projl || !inside_bilinear(projl->uv, target.image.height,
                                   target.image.width)) {
      ++out.dropped;
      continue;
    }
    const auto s0 = sample_bilinear(reference.image, proj0->uv);
    const auto sl = sample_bilinear(target.image, projl->uv);
    if (!s0 || !sl) {
      ++out.dropped;
      continue;
    }
    ++out.pairs;
    const Vec3 r = s0->rgb - sl->rgb;
    out.value += r.squaredNorm();

    if (!request.grad_p0 && !request.grad_dp && !request.grad_points) continue;

    const Vec2 gu0 = 2.0 * s0->d_rgb_du.transpose() * r;
    const Vec2 gul = -2.0 * sl->d_rgb_du.transpose() * r;
    const Vec3 g_xc0 = proj0->jacobian_point.transpose() * gu0;
    const Vec3 g_xcl = projl->jacobian_point.transpose() * gul;
    const Vec3 g_xcl_in_ref = delta.rotation.transpose() * g_xcl;

    if (request.grad_dp) {
      acc_dt += g_xcl;
      acc_dw += xc0.cross(g_xcl_in_ref);
    }
    const Vec3 g_ref_total = g_xc0 + g_xcl_in_ref;
    if (request.grad_p0 || request.grad_points) {
      const Vec3 g_world = base.rotation.transpose() * g_ref_total;
      if (request.grad_p0) {
        acc_t0 += g_ref_total;
        acc_w0 += x.cross(g_world);
      }
      if (request.grad_points && grad_points != nullptr) {
        grad_points->row(i) += g_world.transpose();
      }
    }
  }

  if (request.grad_p0) {
    out.g_p0.head<3>() = base.right_jacobian.transpose() * acc_w0;
    out.g_p0.tail<3>() = acc_t0;
  }
  if (request.grad_dp) {
    out.g_dp.head<3>() = delta.right_jacobian.transpose() * acc_dw;
    out.g_dp.tail<3>() = acc_dt;
  }
  return out;
}

std::optional<Chamfer2dResult> chamfer_2d(
    const std::vector<PixelCoord>& u_sil,
    const std::vector<PixelCoord>& u_proj, bool with_grads) {
  if (u_sil.empty() || u_proj.empty()) return std::nullopt;

  std::vector<Vec2> sil(u_sil.size());
  for (std::size_t k = 0; k < u_sil.size(); ++k) sil[k] = to_vec(u_sil[k]);
  std::vector<Vec2> proj(u_proj.size());
  for (std::size_t j = 0; j < u_proj.size(); ++j) proj[j] = to_vec(u_proj[j]);

  Chamfer2dResult out;
  if (with_grads) out.grad_proj.assign(proj.size(), Vec2::Zero());

  // Directed sum 1: every silhouette pixel to its nearest projection.
  const auto nn_sil = nearest_neighbors<2>(sil, proj);
  for (std::size_t k = 0; k < sil.size(); ++k) {
    out.value += nn_sil[k].dist2;
    if (with_grads) {
      out.grad_proj[nn_sil[k].index] -= 2.0 * (sil[k] - proj[nn_sil[k].index]);
    }
  }
  // Directed sum 2: every projection to its nearest silhouette pixel.
  const auto nn_proj = nearest_neighbors<2>(proj, sil);
  for (std::size_t j = 0; j < proj.size(); ++j) {
    out.value += nn_proj[j].dist2;
    if (with_grads) {
      out.grad_proj[j] += 2.0 * (proj[j] - sil[nn_proj[j].index]);
    }
  }
  return out;
}

double empty_chamfer_penalty(int image_height, int image_width) {
  return 4.0 * (static_cast<double>(image_height) * image_height +
                static_cast<double>(image_width) * image_width);
}

SilhouetteFrameResult silhouette_frame_term(
    const std::vector<PixelCoord>& sil_coords, const PoseTwist& p0,
    const PoseTwist& dp, const PointMatrix& cloud, const VisibleSet& visible,
    const CameraIntrinsics& K, int image_height, int image_width, double z_min,
    const TermRequest& request, PointMatrix* grad_points) {
  SilhouetteFrameResult out;
  const PoseCache base = cache_pose(p0);
  const PoseCache delta = cache_pose(dp);

  std::vector<PixelCoord> projections;
  std::vector<int> point_index;
  std::vector<Vec3> camera_ref;  // xc0 per surviving projection
  projections.reserve(visible.indices.size());
  for (int i : visible.indices) {
    const Vec3 x = cloud.row(i).transpose();
    const Vec3 xc0 = base.rotation * x + base.translation;
    const Vec3 xcl = delta.rotation * xc0 + delta.translation;
    const auto projl = project_camera_point(xcl, K, z_min);
    if (!projl) continue;  // behind camera: no defined projection
    projections.push_back(projl->uv);
    point_index.push_back(i);
    camera_ref.push_back(xc0);
  }

  const auto chamfer = chamfer_2d(sil_coords, projections,
                                  request.grad_p0 || request.grad_dp ||
                                      request.grad_points);
  if (!chamfer) {
    out.value = empty_chamfer_penalty(image_height, image_width);
    out.empty_penalty = true;
    return out;
  }
  out.value = chamfer->value;
  if (chamfer->grad_proj.empty()) return out;

  Vec3 acc_w0 = Vec3::Zero();
  Vec3 acc_t0 = Vec3::Zero();
  Vec3 acc_dw = Vec3::Zero();
  Vec3 acc_dt = Vec3::Zero();
  for (std::size_t j = 0; j < projections.size(); ++j) {
    const Vec3 xc0 = camera_ref[j];
    const Vec3 xcl = delta.rotation * xc0 + delta.translation;
    const auto projl = project_camera_point(xcl, K, z_min);
    const Vec3 g_xcl = projl->jacobian_point.transpose() * chamfer->grad_proj[j];
    const Vec3 g_xcl_in_ref = delta.rotation.transpose() * g_xcl;
    if (request.grad_dp) {
      acc_dt += g_xcl;
      acc_dw += xc0.cross(g_xcl_in_ref);
    }
    if (request.grad_p0 || request.grad_points) {
      const Vec3 x = cloud.row(point_index[j]).transpose();
      const Vec3 g_world = base.rotation.transpose() * g_xcl_in_ref;
      if (request.grad_p0) {
        acc_t0 += g_xcl_in_ref;
        acc_w0 += x.cross(g_world);
      }
      if (request.grad_points && grad_points != nullptr) {
        grad_points->row(point_index[j]) += g_world.transpose();
      }
    }
  }
  if (request.grad_p0) {
    out.g_p0.head<3>() = base.right_jacobian.transpose() * acc_w0;
    out.g_p0.tail<3>() = acc_t0;
  }
  if (request.grad_dp) {
    out.g_dp.head<3>() = delta.right_jacobian.transpose() * acc_dw;
    out.g_dp.tail<3>() = acc_dt;
  }
  return out;
}

namespace {

void check_inputs(const std::vector<Frame>& frames,
                  const std::vector<PoseTwist>& dps) {
  if (frames.size() < 2) {
    throw std::invalid_argument("loss: need at least 2 frames");
  }
  if (dps.size() != frames.size() - 1) {
    throw std::invalid_argument("loss: dps must have L - 1 entries");
  }
}

}  // namespace

PhotometricResult photometric_loss(const std::vector<Frame>& frames,
                                   const PoseTwist& p0,
                                   const std::vector<PoseTwist>& dps,
                                   const StyleVector& s,
                                   const ShapeGenerator& generator,
                                   const CameraIntrinsics& K,
                                   const LossOptions& options,
                                   const FrozenVisibility* frozen) {
  check_inputs(frames, dps);
  const PointMatrix cloud = generator.forward(s);
  FrozenVisibility local;
  if (frozen == nullptr) {
    local = compute_visibility(cloud, p0, dps, K, frames[0].image.height,
                               frames[0].image.width, options);
    frozen = &local;
  }

  PhotometricResult out;
  out.grads.dps.assign(dps.size(), Vec6::Zero());
  PointMatrix grad_points = PointMatrix::Zero(cloud.rows(), 3);
  TermRequest req{true, true, true};
  for (std::size_t l = 0; l < dps.size(); ++l) {
    const auto pair = photometric_pair_term(frames[0], frames[l + 1], p0,
                                            dps[l], cloud, frozen->reference,
                                            K, options.z_min, req,
                                            &grad_points);
    out.value += pair.value;
    out.grads.p0 += pair.g_p0;
    out.grads.dps[l] = pair.g_dp;
    out.n_point_pairs += pair.pairs;
    out.n_dropped_oob += pair.dropped;
    out.per_pair.push_back({pair.pairs, pair.dropped});
  }
  out.grads.style =
      generator.backward(s, grad_points, &frozen->reference.indices);
  return out;
}

SilhouetteResult silhouette_loss(const std::vector<Frame>& frames,
                                 const PoseTwist& p0,
                                 const std::vector<PoseTwist>& dps,
                                 const StyleVector& s,
                                 const ShapeGenerator& generator,
                                 const CameraIntrinsics& K,
                                 const LossOptions& options,
                                 const FrozenVisibility* frozen) {
  check_inputs(frames, dps);
  const PointMatrix cloud = generator.forward(s);
  FrozenVisibility local;
  if (frozen == nullptr) {
    local = compute_visibility(cloud, p0, dps, K, frames[0].image.height,
                               frames[0].image.width, options);
    frozen = &local;
  }

  SilhouetteResult out;
  out.grads.dps.assign(dps.size(), Vec6::Zero());
  PointMatrix grad_points = PointMatrix::Zero(cloud.rows(), 3);
  IndexList active_union;
  TermRequest req{true, true, true};
  const double scale = 1.0 / static_cast<double>(dps.size());
  for (std::size_t l = 0; l < dps.size(); ++l) {
    const auto sil_coords = mask_to_coords(frames[l + 1].mask);
    const auto term = silhouette_frame_term(
        sil_coords, p0, dps[l], cloud, frozen->targets[l], K,
        frames[l + 1].image.height, frames[l + 1].image.width, options.z_min,
        req, &grad_points);
    out.value += scale * term.value;
    out.grads.p0 += scale * term.g_p0;
    out.grads.dps[l] = scale * term.g_dp;
    if (term.empty_penalty) ++out.empty_penalty_frames;
    active_union.insert(active_union.end(), frozen->targets[l].indices.begin(),
                        frozen->targets[l].indices.end());
  }
  // grad_points rows accumulated unscaled; fold the frame mean in here.
  grad_points *= scale;
  std::sort(active_union.begin(), active_union.end());
  active_union.erase(std::unique(active_union.begin(), active_union.end()),
                     active_union.end());
  out.grads.style = generator.backward(s, grad_points, &active_union);
  return out;
}

CombinedResult combined_loss(const std::vector<Frame>& frames,
                             const PoseTwist& p0,
                             const std::vector<PoseTwist>& dps,
                             const StyleVector& s,
                             const ShapeGenerator& generator,
                             const CameraIntrinsics& K,
                             const LossWeights& weights,
                             const LossOptions& options,
                             const FrozenVisibility* frozen) {
  check_inputs(frames, dps);
  const PointMatrix cloud = generator.forward(s);
  FrozenVisibility local;
  if (frozen == nullptr) {
    local = compute_visibility(cloud, p0, dps, K, frames[0].image.height,
                               frames[0].image.width, options);
    frozen = &local;
  }
  const auto ph =
      photometric_loss(frames, p0, dps, s, generator, K, options, frozen);
  const auto cd =
      silhouette_loss(frames, p0, dps, s, generator, K, options, frozen);

  CombinedResult out;
  out.breakdown.l_ph = ph.value;
  out.breakdown.l_cd = cd.value;
  out.breakdown.l_total = ph.value + weights.lambda * cd.value;
  out.breakdown.n_point_pairs = ph.n_point_pairs;
  out.breakdown.n_dropped_oob = ph.n_dropped_oob;
  out.breakdown.ph_per_pair =
      ph.n_point_pairs > 0 ? ph.value / ph.n_point_pairs : 0.0;
  out.per_pair = ph.per_pair;
  out.empty_penalty_frames = cd.empty_penalty_frames;
  out.grads.p0 = ph.grads.p0 + weights.lambda * cd.grads.p0;
  out.grads.dps.resize(dps.size());
  for (std::size_t l = 0; l < dps.size(); ++l) {
    out.grads.dps[l] = ph.grads.dps[l] + weights.lambda * cd.grads.dps[l];
  }
  out.grads.style = ph.grads.style + weights.lambda * cd.grads.style;
  return out;
}

double style_error(const PointMatrix& gt_cloud, const PointMatrix& cloud) {
  if (gt_cloud.rows() == 0 || cloud.rows() == 0) {
    throw std::invalid_argument("style_error: empty cloud");
  }
  std::vector<Vec3> a(gt_cloud.rows());
  for (long i = 0; i < gt_cloud.rows(); ++i) a[i] = gt_cloud.row(i).transpose();
  std::vector<Vec3> b(cloud.rows());
  for (long i = 0; i < cloud.rows(); ++i) b[i] = cloud.row(i).transpose();

  double sum = 0.0;
  for (const auto& nn : nearest_neighbors<3>(a, b)) sum += nn.dist2;
  for (const auto& nn : nearest_neighbors<3>(b, a)) sum += nn.dist2;
  return sum / static_cast<double>(cloud.rows());
}

}  // namespace spba
