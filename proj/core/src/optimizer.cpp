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

#include "spba/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace spba {

const char* to_string(OptimizeStatus status) {
  switch (status) {
    case OptimizeStatus::kConverged: return "converged";
    case OptimizeStatus::kSmallProgress: return "small_progress";
    case OptimizeStatus::kStalled: return "stalled";
    case OptimizeStatus::kMaxRounds: return "max_rounds";
  }
  return "unknown";
}

namespace {

// Per-frame term values cached across blocks so a block update only
// recomputes the terms it touched.
struct TermCache {
  std::vector<double> ph;
  std::vector<double> cd;
  std::vector<PairCounts> counts;
  int empty_penalty_frames = 0;

  double ph_total() const {
    double v = 0.0;
    for (double t : ph) v += t;
    return v;
  }
  double cd_mean() const {
    double v = 0.0;
    for (double t : cd) v += t;
    return v / static_cast<double>(cd.size());
  }
  double total(double lambda) const { return ph_total() + lambda * cd_mean(); }
  long pairs() const {
    long n = 0;
    for (const auto& c : counts) n += c.pairs;
    return n;
  }
  long dropped() const {
    long n = 0;
    for (const auto& c : counts) n += c.dropped;
    return n;
  }
};

struct Workspace {
  const std::vector<Frame>& frames;
  const ShapeGenerator& generator;
  const CameraIntrinsics& K;
  const LossWeights& weights;
  const LossOptions& loss_options;
  std::vector<std::vector<PixelCoord>> sil_coords;  // per target frame

  Workspace(const std::vector<Frame>& frames_in, const ShapeGenerator& gen,
            const CameraIntrinsics& k, const LossWeights& w,
            const LossOptions& lo)
      : frames(frames_in), generator(gen), K(k), weights(w), loss_options(lo) {
    sil_coords.reserve(frames.size() - 1);
    for (std::size_t l = 1; l < frames.size(); ++l) {
      sil_coords.push_back(mask_to_coords(frames[l].mask));
    }
  }

  int target_count() const { return static_cast<int>(frames.size()) - 1; }
  int height() const { return frames[0].image.height; }
  int width() const { return frames[0].image.width; }
  double cd_scale() const { return 1.0 / target_count(); }

  void eval_frame(int l, const PoseTwist& p0, const PoseTwist& dp,
                  const PointMatrix& cloud, const FrozenVisibility& vis,
                  const TermRequest& request, PointMatrix* grad_points,
                  PhotometricPairResult* ph, SilhouetteFrameResult* cd) const {
    *ph = photometric_pair_term(frames[0], frames[l + 1], p0, dp, cloud,
                                vis.reference, K, loss_options.z_min, request,
                                grad_points);
    // The silhouette gradient contributions carry the 1/(L-1) prefactor and
    // lambda at the call sites below.
    *cd = silhouette_frame_term(sil_coords[l], p0, dp, cloud, vis.targets[l],
                                K, frames[l + 1].image.height,
                                frames[l + 1].image.width, loss_options.z_min,
                                request, grad_points);
  }

  void refresh_cache(const PoseTwist& p0, const std::vector<PoseTwist>& dps,
                     const PointMatrix& cloud, const FrozenVisibility& vis,
                     TermCache* cache) const {
    const int n = target_count();
    cache->ph.assign(n, 0.0);
    cache->cd.assign(n, 0.0);
    cache->counts.assign(n, {});
    cache->empty_penalty_frames = 0;
    TermRequest value_only{};
    for (int l = 0; l < n; ++l) {
      PhotometricPairResult ph;
      SilhouetteFrameResult cd;
      eval_frame(l, p0, dps[l], cloud, vis, value_only, nullptr, &ph, &cd);
      cache->ph[l] = ph.value;
      cache->cd[l] = cd.value;
      cache->counts[l] = {ph.pairs, ph.dropped};
      if (cd.empty_penalty) ++cache->empty_penalty_frames;
    }
  }
};

LossTraceRow make_row(int round, const std::string& block,
                      const TermCache& cache, double lambda,
                      double grad_norm) {
  LossTraceRow row;
  row.outer_iter = round;
  row.block = block;
  row.l_ph = cache.ph_total();
  row.l_cd = cache.cd_mean();
  row.l_total = cache.total(lambda);
  row.n_point_pairs = cache.pairs();
  row.n_dropped_oob = cache.dropped();
  row.grad_norm = grad_norm;
  return row;
}

LbfgsOptions inner_options(const OptimizerOptions& options) {
  LbfgsOptions inner;
  inner.history = options.history;
  inner.max_iterations = options.inner_steps;
  inner.grad_tol = options.grad_tol;
  inner.min_rel_decrease = options.min_rel_decrease;
  inner.wolfe_c1 = options.wolfe_c1;
  inner.wolfe_c2 = options.wolfe_c2;
  return inner;
}

}  // namespace

OptimizationState alternate_optimize(const std::vector<Frame>& frames,
                                     const ShapeGenerator& generator,
                                     const CameraIntrinsics& K,
                                     const OptimizationState& init,
                                     const LossWeights& weights,
                                     const LossOptions& loss_options,
                                     const OptimizerOptions& options,
                                     const BlockMask& mask) {
  if (frames.size() < 2) {
    throw std::invalid_argument("alternate_optimize: need at least 2 frames");
  }
  if (init.dps.size() != frames.size() - 1) {
    throw std::invalid_argument("alternate_optimize: dps size mismatch");
  }

  Workspace ws(frames, generator, K, weights, loss_options);
  const int n_targets = ws.target_count();
  const double lambda = weights.lambda;
  const double cd_scale = ws.cd_scale();

  OptimizationState state;
  state.p0 = init.p0;
  state.dps = init.dps;
  state.s = init.s;
  state.variables_touched = (mask.optimize_dps ? 6L * n_targets : 0L) +
                            (mask.optimize_p0 ? 6L : 0L) +
                            (mask.optimize_style ? generator.dims : 0L);

  PointMatrix cloud = generator.forward(state.s);
  state.visibility = compute_visibility(cloud, state.p0, state.dps, K,
                                        ws.height(), ws.width(), loss_options);
  TermCache cache;
  ws.refresh_cache(state.p0, state.dps, cloud, state.visibility, &cache);
  state.history.push_back(make_row(0, "init", cache, lambda, 0.0));

  const double initial_total = cache.total(lambda);
  const double stop_threshold =
      std::max(options.delta_l_abs, options.delta_l_rel * initial_total);
  // Loop condition checked at the top: an init already at the threshold
  // (e.g. ground truth with delta_L set to the rasterization floor) runs
  // zero rounds and leaves every parameter untouched.
  if (initial_total <= stop_threshold) {
    state.status = OptimizeStatus::kConverged;
    state.empty_penalty_frames = cache.empty_penalty_frames;
    return state;
  }

  const LbfgsOptions inner = inner_options(options);

  for (int round = 1; round <= options.max_outer_rounds; ++round) {
    state.rounds = round;
    // Refresh the frozen visibility; the resulting discrete jump in the
    // loss is logged as its own row.
    state.visibility = compute_visibility(cloud, state.p0, state.dps, K,
                                          ws.height(), ws.width(),
                                          loss_options);
    ws.refresh_cache(state.p0, state.dps, cloud, state.visibility, &cache);
    state.history.push_back(make_row(round, "visibility", cache, lambda, 0.0));

    const double round_start = cache.total(lambda);
    bool any_block_ran = false;
    bool all_blocks_failed = true;

    struct BlockSpec {
      enum Kind { kDp, kP0, kStyle } kind;
      int frame = -1;
    };
    std::vector<BlockSpec> schedule;
    if (mask.optimize_dps) {
      for (int l = 0; l < n_targets; ++l) {
        schedule.push_back({BlockSpec::kDp, l});
      }
    }
    if (mask.optimize_p0) schedule.push_back({BlockSpec::kP0, -1});
    if (mask.optimize_style) schedule.push_back({BlockSpec::kStyle, -1});
    if (options.reverse_block_order) {
      std::reverse(schedule.begin(), schedule.end());
    }

    for (const auto& block : schedule) {
      any_block_ran = true;
      LbfgsResult result;
      std::string block_name;

      if (block.kind == BlockSpec::kDp) {
        const int l = block.frame;
        block_name = "dp_" + std::to_string(l + 1);
        const Objective objective = [&](const VecX& v, VecX* grad) {
          const PoseTwist dp = PoseTwist::from_vector(v);
          TermRequest request;
          request.grad_dp = grad != nullptr;
          PhotometricPairResult ph;
          SilhouetteFrameResult cd;
          ws.eval_frame(l, state.p0, dp, cloud, state.visibility, request,
                        nullptr, &ph, &cd);
          if (grad != nullptr) {
            *grad = ph.g_dp + lambda * cd_scale * cd.g_dp;
          }
          return ph.value + lambda * cd_scale * cd.value;
        };
        result = lbfgs_minimize(objective, state.dps[l].to_vector(), inner);
        state.dps[l] = PoseTwist::from_vector(result.x);
        // Refresh this frame's cached terms at the accepted point.
        TermRequest value_only{};
        PhotometricPairResult ph;
        SilhouetteFrameResult cd;
        ws.eval_frame(l, state.p0, state.dps[l], cloud, state.visibility,
                      value_only, nullptr, &ph, &cd);
        cache.ph[l] = ph.value;
        cache.cd[l] = cd.value;
        cache.counts[l] = {ph.pairs, ph.dropped};
      } else if (block.kind == BlockSpec::kP0) {
        block_name = "p0";
        const Objective objective = [&](const VecX& v, VecX* grad) {
          const PoseTwist p0 = PoseTwist::from_vector(v);
          TermRequest request;
          request.grad_p0 = grad != nullptr;
          double value = 0.0;
          Vec6 g = Vec6::Zero();
          for (int l = 0; l < n_targets; ++l) {
            PhotometricPairResult ph;
            SilhouetteFrameResult cd;
            ws.eval_frame(l, p0, state.dps[l], cloud, state.visibility,
                          request, nullptr, &ph, &cd);
            value += ph.value + lambda * cd_scale * cd.value;
            if (grad != nullptr) {
              g += ph.g_p0 + lambda * cd_scale * cd.g_p0;
            }
          }
          if (grad != nullptr) *grad = g;
          return value;
        };
        result = lbfgs_minimize(objective, state.p0.to_vector(), inner);
        state.p0 = PoseTwist::from_vector(result.x);
        ws.refresh_cache(state.p0, state.dps, cloud, state.visibility, &cache);
      } else {
        block_name = "s";
        const Objective objective = [&](const VecX& v, VecX* grad) {
          const PointMatrix trial_cloud = generator.forward(v);
          TermRequest request;
          request.grad_points = grad != nullptr;
          PointMatrix grad_points;
          if (grad != nullptr) {
            grad_points = PointMatrix::Zero(trial_cloud.rows(), 3);
          }
          double value = 0.0;
          PointMatrix sil_grad_points;
          if (grad != nullptr) {
            sil_grad_points = PointMatrix::Zero(trial_cloud.rows(), 3);
          }
          for (int l = 0; l < n_targets; ++l) {
            const PhotometricPairResult ph = photometric_pair_term(
                ws.frames[0], ws.frames[l + 1], state.p0, state.dps[l],
                trial_cloud, state.visibility.reference, K,
                loss_options.z_min, request,
                grad != nullptr ? &grad_points : nullptr);
            const SilhouetteFrameResult cd = silhouette_frame_term(
                ws.sil_coords[l], state.p0, state.dps[l], trial_cloud,
                state.visibility.targets[l], K,
                ws.frames[l + 1].image.height, ws.frames[l + 1].image.width,
                loss_options.z_min, request,
                grad != nullptr ? &sil_grad_points : nullptr);
            value += ph.value + lambda * cd_scale * cd.value;
          }
          if (grad != nullptr) {
            grad_points += lambda * cd_scale * sil_grad_points;
            // The photometric rows are restricted to the reference visible
            // set and the silhouette rows to the per-target sets; rows
            // outside those sets were never written, so the full-set
            // backward is exact here.
            *grad = generator.backward(v, grad_points, nullptr);
          }
          return value;
        };
        result = lbfgs_minimize(objective, state.s, inner);
        state.s = result.x;
        cloud = generator.forward(state.s);
        ws.refresh_cache(state.p0, state.dps, cloud, state.visibility, &cache);
      }

      if (result.status != LbfgsStatus::kLineSearchFailed ||
          result.iterations > 0) {
        all_blocks_failed = false;
      }
      state.history.push_back(
          make_row(round, block_name, cache, lambda, result.grad_norm));
    }

    const double round_end = cache.total(lambda);
    if (round_end <= stop_threshold) {
      state.status = OptimizeStatus::kConverged;
      break;
    }
    if (any_block_ran && all_blocks_failed) {
      state.status = OptimizeStatus::kStalled;
      break;
    }
    if (round_start - round_end <
        options.min_rel_decrease * std::max(1.0, std::abs(round_start))) {
      state.status = OptimizeStatus::kSmallProgress;
      break;
    }
    if (round == options.max_outer_rounds) {
      state.status = OptimizeStatus::kMaxRounds;
    }
  }

  state.empty_penalty_frames = cache.empty_penalty_frames;
  return state;
}

DirectPointsResult optimize_direct_points(const std::vector<Frame>& frames,
                                          const PointMatrix& init_cloud,
                                          const PoseTwist& p0,
                                          const std::vector<PoseTwist>& dps,
                                          const CameraIntrinsics& K,
                                          const LossWeights& weights,
                                          const LossOptions& loss_options,
                                          const OptimizerOptions& options) {
  if (frames.size() < 2 || dps.size() != frames.size() - 1) {
    throw std::invalid_argument("optimize_direct_points: bad inputs");
  }
  ShapeGenerator no_prior;  // unused by the schedule below
  no_prior.dims = 0;
  no_prior.n_points = init_cloud.rows();
  Workspace ws(frames, no_prior, K, weights, loss_options);
  const int n_targets = ws.target_count();
  const double lambda = weights.lambda;
  const double cd_scale = ws.cd_scale();

  DirectPointsResult result;
  result.cloud = init_cloud;
  result.optimized_indices =
      visible_subset(init_cloud, p0, K, ws.height(), ws.width(),
                     loss_options.upscale, loss_options.z_min)
          .indices;
  const long m = static_cast<long>(result.optimized_indices.size());
  result.variables_touched = 3 * m;
  if (m == 0) {
    result.status = OptimizeStatus::kStalled;
    return result;
  }

  FrozenVisibility visibility;
  TermCache cache;
  const LbfgsOptions inner = inner_options(options);

  auto gather = [&](const PointMatrix& cloud) {
    VecX v(3 * m);
    for (long j = 0; j < m; ++j) {
      v.segment<3>(3 * j) = cloud.row(result.optimized_indices[j]).transpose();
    }
    return v;
  };
  auto scatter = [&](const VecX& v, PointMatrix* cloud) {
    for (long j = 0; j < m; ++j) {
      cloud->row(result.optimized_indices[j]) =
          v.segment<3>(3 * j).transpose();
    }
  };

  visibility = compute_visibility(result.cloud, p0, dps, K, ws.height(),
                                  ws.width(), loss_options);
  ws.refresh_cache(p0, dps, result.cloud, visibility, &cache);
  result.history.push_back(make_row(0, "init", cache, lambda, 0.0));
  const double initial_total = cache.total(lambda);
  const double stop_threshold =
      std::max(options.delta_l_abs, options.delta_l_rel * initial_total);
  if (initial_total <= stop_threshold) {
    result.status = OptimizeStatus::kConverged;
    return result;
  }

  PointMatrix scratch = result.cloud;
  for (int round = 1; round <= options.max_outer_rounds; ++round) {
    result.rounds = round;
    visibility = compute_visibility(result.cloud, p0, dps, K, ws.height(),
                                    ws.width(), loss_options);
    ws.refresh_cache(p0, dps, result.cloud, visibility, &cache);
    result.history.push_back(
        make_row(round, "visibility", cache, lambda, 0.0));
    const double round_start = cache.total(lambda);

    const Objective objective = [&](const VecX& v, VecX* grad) {
      scatter(v, &scratch);
      TermRequest request;
      request.grad_points = grad != nullptr;
      PointMatrix grad_points;
      PointMatrix sil_grad_points;
      if (grad != nullptr) {
        grad_points = PointMatrix::Zero(scratch.rows(), 3);
        sil_grad_points = PointMatrix::Zero(scratch.rows(), 3);
      }
      double value = 0.0;
      for (int l = 0; l < n_targets; ++l) {
        PhotometricPairResult ph = photometric_pair_term(
            frames[0], frames[l + 1], p0, dps[l], scratch,
            visibility.reference, K, loss_options.z_min, request,
            grad != nullptr ? &grad_points : nullptr);
        SilhouetteFrameResult cd = silhouette_frame_term(
            ws.sil_coords[l], p0, dps[l], scratch, visibility.targets[l], K,
            frames[l + 1].image.height, frames[l + 1].image.width,
            loss_options.z_min, request,
            grad != nullptr ? &sil_grad_points : nullptr);
        value += ph.value + lambda * cd_scale * cd.value;
      }
      if (grad != nullptr) {
        grad_points += lambda * cd_scale * sil_grad_points;
        grad->resize(3 * m);
        for (long j = 0; j < m; ++j) {
          grad->segment<3>(3 * j) =
              grad_points.row(result.optimized_indices[j]).transpose();
        }
      }
      return value;
    };

    const LbfgsResult lbfgs = lbfgs_minimize(objective, gather(result.cloud),
                                             inner);
    scatter(lbfgs.x, &result.cloud);
    scratch = result.cloud;
    ws.refresh_cache(p0, dps, result.cloud, visibility, &cache);
    result.history.push_back(
        make_row(round, "points", cache, lambda, lbfgs.grad_norm));

    const double round_end = cache.total(lambda);
    if (round_end <= stop_threshold) {
      result.status = OptimizeStatus::kConverged;
      break;
    }
    if (lbfgs.status == LbfgsStatus::kLineSearchFailed &&
        lbfgs.iterations == 0) {
      result.status = OptimizeStatus::kStalled;
      break;
    }
    if (round_start - round_end <
        options.min_rel_decrease * std::max(1.0, std::abs(round_start))) {
      result.status = OptimizeStatus::kSmallProgress;
      break;
    }
    if (round == options.max_outer_rounds) {
      result.status = OptimizeStatus::kMaxRounds;
    }
  }
  return result;
}

}  // namespace spba
