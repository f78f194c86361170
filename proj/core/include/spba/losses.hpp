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

#include <functional>
#include <optional>
#include <vector>

#include "spba/image.hpp"
#include "spba/pseudo_renderer.hpp"
#include "spba/shape_prior.hpp"
#include "spba/types.hpp"

namespace spba {

struct LossWeights {
  double lambda = 0.01;  // weight on the silhouette term
};

struct LossBreakdown {
  double l_ph = 0.0;
  double l_cd = 0.0;
  double l_total = 0.0;  // always l_ph + lambda * l_cd, same accumulation
  long n_point_pairs = 0;
  long n_dropped_oob = 0;
  double ph_per_pair = 0.0;  // scale-independent diagnostic
};

// Which pose selects the visible set entering the silhouette term. The
// target-pose reading matches the per-frame visibility subscript of the
// silhouette definition; the reference alternative is kept for comparison.
enum class SilhouetteVisibility { kTargetPose, kReferencePose };

struct LossOptions {
  int upscale = 5;
  double z_min = kDefaultZMin;
  SilhouetteVisibility silhouette_visibility =
      SilhouetteVisibility::kTargetPose;
};

// Visibility index sets frozen for one or more gradient evaluations.
// Selection receives no gradient; only the positions of the selected
// points do.
struct FrozenVisibility {
  VisibleSet reference;             // from p0
  std::vector<VisibleSet> targets;  // per target frame l = 1..L-1
};

FrozenVisibility compute_visibility(const PointMatrix& cloud,
                                    const PoseTwist& p0,
                                    const std::vector<PoseTwist>& dps,
                                    const CameraIntrinsics& K,
                                    int image_height, int image_width,
                                    const LossOptions& options);

// Type-erased differentiable generator handle so losses and the optimizer
// work with any shape prior.
struct ShapeGenerator {
  std::function<PointMatrix(const StyleVector&)> forward;
  std::function<StyleVector(const StyleVector&, const PointMatrix&,
                            const IndexList*)>
      backward;
  int dims = 0;
  long n_points = 0;
};

ShapeGenerator make_generator(const LinearShapePrior& prior);
ShapeGenerator make_generator(const MlpShapePrior& prior);

struct BlockGradients {
  Vec6 p0 = Vec6::Zero();
  std::vector<Vec6> dps;
  StyleVector style;
};

struct PairCounts {
  long pairs = 0;
  long dropped = 0;
};

struct PhotometricResult {
  double value = 0.0;
  BlockGradients grads;
  long n_point_pairs = 0;
  long n_dropped_oob = 0;
  std::vector<PairCounts> per_pair;  // pairs + dropped = M_p0, per frame pair
};

// Photometric loss over all frame pairs: for each target frame l and each
// point visible from p0, the squared RGB residual between the reference
// sample at pi(x; p0) and the target sample at pi(x; p0 o dp_l). Points
// whose either projection is behind a camera or outside the bilinear
// interior are dropped from that pair (and counted). Zero surviving pairs
// is a valid degenerate outcome: loss 0 with zero gradients.
PhotometricResult photometric_loss(const std::vector<Frame>& frames,
                                   const PoseTwist& p0,
                                   const std::vector<PoseTwist>& dps,
                                   const StyleVector& s,
                                   const ShapeGenerator& generator,
                                   const CameraIntrinsics& K,
                                   const LossOptions& options,
                                   const FrozenVisibility* frozen = nullptr);

struct Chamfer2dResult {
  double value = 0.0;
  std::vector<Vec2> grad_proj;  // d value / d u_proj[j]
};

// Two directed sums of squared nearest-neighbor distances. The silhouette
// coordinates are constant data; gradients flow to the projected points
// only. Empty when either set is empty (EmptySet): the caller maps that to
// the flat penalty below.
std::optional<Chamfer2dResult> chamfer_2d(
    const std::vector<PixelCoord>& u_sil,
    const std::vector<PixelCoord>& u_proj, bool with_grads = true);

// Flat, zero-gradient stand-in when a silhouette Chamfer term has an empty
// side; loud in the trace but numerically sane.
double empty_chamfer_penalty(int image_height, int image_width);

struct SilhouetteResult {
  double value = 0.0;  // mean over the L-1 target frames
  BlockGradients grads;
  int empty_penalty_frames = 0;
};

// Mean 2D Chamfer between each target frame's silhouette pixel set and the
// projections of the points visible from that frame's pose.
SilhouetteResult silhouette_loss(const std::vector<Frame>& frames,
                                 const PoseTwist& p0,
                                 const std::vector<PoseTwist>& dps,
                                 const StyleVector& s,
                                 const ShapeGenerator& generator,
                                 const CameraIntrinsics& K,
                                 const LossOptions& options,
                                 const FrozenVisibility* frozen = nullptr);

struct CombinedResult {
  LossBreakdown breakdown;
  BlockGradients grads;
  std::vector<PairCounts> per_pair;
  int empty_penalty_frames = 0;
};

CombinedResult combined_loss(const std::vector<Frame>& frames,
                             const PoseTwist& p0,
                             const std::vector<PoseTwist>& dps,
                             const StyleVector& s,
                             const ShapeGenerator& generator,
                             const CameraIntrinsics& K,
                             const LossWeights& weights,
                             const LossOptions& options,
                             const FrozenVisibility* frozen = nullptr);

// 3D Chamfer style metric: (1/|cloud|) * (sum_gt min + sum_cloud min),
// a single prefactor over both directed sums.
double style_error(const PointMatrix& gt_cloud, const PointMatrix& cloud);

// ---- Per-frame terms (used by the block-coordinate optimizer) ----

struct TermRequest {
  bool grad_p0 = false;
  bool grad_dp = false;
  bool grad_points = false;
};

struct PhotometricPairResult {
  double value = 0.0;
  Vec6 g_p0 = Vec6::Zero();
  Vec6 g_dp = Vec6::Zero();
  long pairs = 0;
  long dropped = 0;
};

// One frame pair of the photometric sum. grad_points, when requested,
// accumulates dL/dx into the caller's N x 3 buffer.
PhotometricPairResult photometric_pair_term(
    const Frame& reference, const Frame& target, const PoseTwist& p0,
    const PoseTwist& dp, const PointMatrix& cloud, const VisibleSet& visible,
    const CameraIntrinsics& K, double z_min, const TermRequest& request,
    PointMatrix* grad_points);

struct SilhouetteFrameResult {
  double value = 0.0;  // un-averaged Chamfer of this frame
  Vec6 g_p0 = Vec6::Zero();
  Vec6 g_dp = Vec6::Zero();
  bool empty_penalty = false;
};

SilhouetteFrameResult silhouette_frame_term(
    const std::vector<PixelCoord>& sil_coords, const PoseTwist& p0,
    const PoseTwist& dp, const PointMatrix& cloud, const VisibleSet& visible,
    const CameraIntrinsics& K, int image_height, int image_width, double z_min,
    const TermRequest& request, PointMatrix* grad_points);

}  // namespace spba
