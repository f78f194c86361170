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

#include "spba/gradcheck.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spba/losses.hpp"
#include "spba/random.hpp"

namespace spba {

namespace {

constexpr double kPi = std::numbers::pi;

double rel_err(const VecX& analytic, const VecX& fd) {
  const double scale = std::max(analytic.norm(), fd.norm());
  if (scale < 1e-12) return 0.0;
  return (analytic - fd).norm() / scale;
}

double rel_err_mat(const MatX& analytic, const MatX& fd) {
  const double scale = std::max(analytic.norm(), fd.norm());
  if (scale < 1e-12) return 0.0;
  return (analytic - fd).norm() / scale;
}

// ---- geometry suites ----

double check_exp_so3_action(Rng& rng) {
  const Vec3 omega = rng.unit_vector() * rng.uniform(0.0, 0.95 * kPi);
  const Vec3 x(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2));
  const Mat3 analytic = exp_so3_jacobian(omega, x);
  Mat3 fd;
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    Vec3 p = omega, m = omega;
    p[k] += h;
    m[k] -= h;
    fd.col(k) = (exp_so3(p) * x - exp_so3(m) * x) / (2.0 * h);
  }
  return rel_err_mat(analytic, fd);
}

struct RandomCamera {
  PoseTwist pose;
  CameraIntrinsics K;
  Vec3 x;  // world point strictly in front of the camera
};

RandomCamera random_camera(Rng& rng) {
  RandomCamera out;
  out.pose.omega = rng.unit_vector() * rng.uniform(0.0, 0.9 * kPi);
  out.pose.trans =
      Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  out.K = {rng.uniform(40, 120), rng.uniform(40, 120), rng.uniform(-5, 5),
           rng.uniform(-5, 5)};
  // Choose the camera-frame point first so depth stays safely positive.
  const Vec3 xc(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.5, 4.0));
  out.x = exp_so3(out.pose.omega).transpose() * (xc - out.pose.trans);
  return out;
}

double check_project(Rng& rng) {
  const RandomCamera cam = random_camera(rng);
  const auto analytic = project_jacobians(cam.x, cam.pose, cam.K);
  const double h = 1e-6;
  auto value = [&](const Vec3& omega, const Vec3& trans, const Vec3& x) {
    const auto uv = project(x, PoseTwist{omega, trans}, cam.K);
    return Vec2(uv->u, uv->v);
  };
  double worst = 0.0;
  Mat23 fd;
  for (int k = 0; k < 3; ++k) {
    Vec3 p = cam.pose.omega, m = cam.pose.omega;
    p[k] += h;
    m[k] -= h;
    fd.col(k) = (value(p, cam.pose.trans, cam.x) -
                 value(m, cam.pose.trans, cam.x)) /
                (2.0 * h);
  }
  worst = std::max(worst, rel_err_mat(analytic->d_uv_d_omega, fd));
  for (int k = 0; k < 3; ++k) {
    Vec3 p = cam.pose.trans, m = cam.pose.trans;
    p[k] += h;
    m[k] -= h;
    fd.col(k) = (value(cam.pose.omega, p, cam.x) -
                 value(cam.pose.omega, m, cam.x)) /
                (2.0 * h);
  }
  worst = std::max(worst, rel_err_mat(analytic->d_uv_d_trans, fd));
  for (int k = 0; k < 3; ++k) {
    Vec3 p = cam.x, m = cam.x;
    p[k] += h;
    m[k] -= h;
    fd.col(k) = (value(cam.pose.omega, cam.pose.trans, p) -
                 value(cam.pose.omega, cam.pose.trans, m)) /
                (2.0 * h);
  }
  worst = std::max(worst, rel_err_mat(analytic->d_uv_d_point, fd));
  return worst;
}

double check_project_composed(Rng& rng) {
  // Build (base, delta) so the composed transform is the random camera.
  const RandomCamera cam = random_camera(rng);
  PoseTwist base;
  base.omega = rng.unit_vector() * rng.uniform(0.0, 0.5 * kPi);
  base.trans = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
  const RigidTransform composed = transform_of(cam.pose);
  const RigidTransform b = transform_of(base);
  const Mat3 dr = composed.rotation * b.rotation.transpose();
  const PoseTwist delta{log_so3(dr),
                        composed.translation - dr * b.translation};

  const auto analytic = project_composed_jacobians(cam.x, base, delta, cam.K);
  if (!analytic) return 0.0;
  const double h = 1e-6;
  auto value = [&](const PoseTwist& p0, const PoseTwist& dp, const Vec3& x) {
    const auto uv = project_composed(x, p0, dp, cam.K);
    return Vec2(uv->u, uv->v);
  };
  double worst = 0.0;
  Mat23 fd;
  auto sweep = [&](auto getter, const Mat23& block) {
    for (int k = 0; k < 3; ++k) {
      PoseTwist p0p = base, p0m = base, dpp = delta, dpm = delta;
      Vec3 xp = cam.x, xm = cam.x;
      getter(k, h, p0p, dpp, xp);
      getter(k, -h, p0m, dpm, xm);
      fd.col(k) = (value(p0p, dpp, xp) - value(p0m, dpm, xm)) / (2.0 * h);
    }
    worst = std::max(worst, rel_err_mat(block, fd));
  };
  sweep([](int k, double d, PoseTwist& p0, PoseTwist&, Vec3&) {
          p0.omega[k] += d;
        },
        analytic->d_uv_d_omega0);
  sweep([](int k, double d, PoseTwist& p0, PoseTwist&, Vec3&) {
          p0.trans[k] += d;
        },
        analytic->d_uv_d_trans0);
  sweep([](int k, double d, PoseTwist&, PoseTwist& dp, Vec3&) {
          dp.omega[k] += d;
        },
        analytic->d_uv_d_domega);
  sweep([](int k, double d, PoseTwist&, PoseTwist& dp, Vec3&) {
          dp.trans[k] += d;
        },
        analytic->d_uv_d_dtrans);
  sweep([](int k, double d, PoseTwist&, PoseTwist&, Vec3& x) { x[k] += d; },
        analytic->d_uv_d_point);
  return worst;
}

// ---- imaging suite ----

ImageRGB smooth_image(Rng& rng, int h, int w) {
  ImageRGB image(h, w);
  for (int c = 0; c < 3; ++c) {
    double kx[4], ky[4], phase[4], amp[4];
    double total = 0.0;
    for (int i = 0; i < 4; ++i) {
      kx[i] = rng.uniform(0.1, 0.8);
      ky[i] = rng.uniform(0.1, 0.8);
      phase[i] = rng.uniform(0.0, 2.0 * kPi);
      amp[i] = rng.uniform(0.2, 1.0);
      total += amp[i];
    }
    for (int i = 0; i < 4; ++i) amp[i] *= 0.45 / total;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double v = 0.5;
        for (int i = 0; i < 4; ++i) {
          v += amp[i] * std::sin(kx[i] * x + ky[i] * y + phase[i]);
        }
        image.pixel_ptr(x, y)[c] = static_cast<float>(v);
      }
    }
  }
  return image;
}

double check_bilinear(Rng& rng) {
  const ImageRGB image = smooth_image(rng, 12, 12);
  // Keep the sample away from cell boundaries; the blend is not
  // differentiable across them.
  const PixelCoord u{rng.uniform_index(10) + rng.uniform(0.05, 0.95),
                     rng.uniform_index(10) + rng.uniform(0.05, 0.95)};
  const auto s = sample_bilinear(image, u);
  const double h = 1e-4;
  Mat32 fd;
  fd.col(0) = (sample_bilinear(image, {u.u + h, u.v})->rgb -
               sample_bilinear(image, {u.u - h, u.v})->rgb) /
              (2.0 * h);
  fd.col(1) = (sample_bilinear(image, {u.u, u.v + h})->rgb -
               sample_bilinear(image, {u.u, u.v - h})->rgb) /
              (2.0 * h);
  return rel_err_mat(s->d_rgb_du, fd);
}

// ---- shape prior suite ----

LinearShapePrior random_prior(Rng& rng, long n, int d) {
  LinearShapePrior prior;
  prior.mean.resize(n, 3);
  for (long i = 0; i < n; ++i) {
    prior.mean.row(i) = 0.35 * rng.unit_vector().transpose();
  }
  prior.basis.resize(d);
  prior.mode_scales = VecX::Constant(d, 0.1);
  prior.singular_values = VecX::Constant(d, 0.1);
  std::vector<VecX> flat;
  for (int k = 0; k < d; ++k) {
    VecX v(3 * n);
    for (long i = 0; i < v.size(); ++i) v[i] = rng.normal();
    for (const auto& prev : flat) v -= prev.dot(v) * prev;
    v.normalize();
    flat.push_back(v);
    PointMatrix mode(n, 3);
    Eigen::Map<VecX>(mode.data(), mode.size()) = v;
    prior.basis[k] = mode;
  }
  return prior;
}

double check_generate(Rng& rng) {
  const long n = 40;
  const int d = 4;
  const LinearShapePrior prior = random_prior(rng, n, d);
  StyleVector s(d);
  for (int k = 0; k < d; ++k) s[k] = rng.normal();
  PointMatrix weights(n, 3);
  for (long i = 0; i < weights.size(); ++i) weights.data()[i] = rng.normal();

  // Random active subset on half the instances.
  IndexList active;
  const IndexList* active_ptr = nullptr;
  if (rng.uniform() < 0.5) {
    for (int i = 0; i < n; ++i) {
      if (rng.uniform() < 0.4) active.push_back(i);
    }
    if (active.empty()) active.push_back(0);
    active_ptr = &active;
  }

  auto f = [&](const StyleVector& sv) {
    const PointMatrix cloud = generate(prior, sv);
    double v = 0.0;
    if (active_ptr == nullptr) {
      v = (cloud.array() * weights.array()).sum();
    } else {
      for (int i : *active_ptr) v += cloud.row(i).dot(weights.row(i));
    }
    return v;
  };
  const StyleVector analytic = generate_backward(prior, s, weights, active_ptr);
  const double h = 1e-6;
  StyleVector fd(d);
  for (int k = 0; k < d; ++k) {
    StyleVector p = s, m = s;
    p[k] += h;
    m[k] -= h;
    fd[k] = (f(p) - f(m)) / (2.0 * h);
  }
  return rel_err(analytic, fd);
}

// ---- chamfer suite ----

// Rejects instances with a near-tie between the best and second nearest
// neighbor in either direction; the loss is non-differentiable there.
bool chamfer_gaps_ok(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                     double min_gap) {
  for (const auto& q : a) {
    double best = 1e300, second = 1e300;
    for (const auto& t : b) {
      const double d2 = (q - t).squaredNorm();
      if (d2 < best) {
        second = best;
        best = d2;
      } else if (d2 < second) {
        second = d2;
      }
    }
    if (b.size() > 1 && second - best < min_gap) return false;
  }
  return true;
}

double check_chamfer(Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const int n_sil = 20 + static_cast<int>(rng.uniform_index(40));
    const int n_proj = 10 + static_cast<int>(rng.uniform_index(30));
    std::vector<PixelCoord> sil(n_sil), proj(n_proj);
    std::vector<Vec2> sil_v(n_sil), proj_v(n_proj);
    for (int i = 0; i < n_sil; ++i) {
      sil[i] = {rng.uniform(0, 32), rng.uniform(0, 32)};
      sil_v[i] = {sil[i].u, sil[i].v};
    }
    for (int i = 0; i < n_proj; ++i) {
      proj[i] = {rng.uniform(0, 32), rng.uniform(0, 32)};
      proj_v[i] = {proj[i].u, proj[i].v};
    }
    if (!chamfer_gaps_ok(sil_v, proj_v, 1e-2) ||
        !chamfer_gaps_ok(proj_v, sil_v, 1e-2)) {
      continue;
    }
    const auto result = chamfer_2d(sil, proj);
    const double h = 1e-6;
    VecX analytic(2 * n_proj), fd(2 * n_proj);
    for (int j = 0; j < n_proj; ++j) {
      analytic[2 * j] = result->grad_proj[j].x();
      analytic[2 * j + 1] = result->grad_proj[j].y();
      for (int axis = 0; axis < 2; ++axis) {
        auto perturbed = proj;
        (axis == 0 ? perturbed[j].u : perturbed[j].v) += h;
        const double fp = chamfer_2d(sil, perturbed, false)->value;
        (axis == 0 ? perturbed[j].u : perturbed[j].v) -= 2.0 * h;
        const double fm = chamfer_2d(sil, perturbed, false)->value;
        fd[2 * j + axis] = (fp - fm) / (2.0 * h);
      }
    }
    return rel_err(analytic, fd);
  }
  return 0.0;  // could not draw a clean instance; vanishingly unlikely
}

// ---- loss-level suites ----

struct LossInstance {
  std::vector<Frame> frames;
  PoseTwist p0;
  std::vector<PoseTwist> dps;
  LinearShapePrior prior;
  StyleVector s;
  CameraIntrinsics K;
  LossOptions options;
  FrozenVisibility frozen;
};

// Drops every index whose base projection comes within the given margins of
// an image border, a bilinear cell line, or the depth guard, in any frame.
IndexList filter_safe(const PointMatrix& cloud, const PoseTwist& p0,
                      const std::vector<PoseTwist>& dps,
                      const CameraIntrinsics& K, int h, int w,
                      const IndexList& candidates) {
  const double border = 1.0;
  const double cell_margin = 5e-3;
  const double z_margin = 0.05;
  IndexList out;
  std::vector<RigidTransform> transforms;
  transforms.push_back(transform_of(p0));
  for (const auto& dp : dps) {
    transforms.push_back(compose(transform_of(p0), transform_of(dp)));
  }
  for (int i : candidates) {
    bool ok = true;
    for (const auto& t : transforms) {
      const Vec3 xc = t.apply(cloud.row(i).transpose());
      if (xc.z() < z_margin) {
        ok = false;
        break;
      }
      const auto p = project_camera_point(xc, K, 1e-6);
      const double fu = p->uv.u - std::floor(p->uv.u);
      const double fv = p->uv.v - std::floor(p->uv.v);
      if (p->uv.u < border || p->uv.u > w - 1 - border || p->uv.v < border ||
          p->uv.v > h - 1 - border || fu < cell_margin ||
          fu > 1.0 - cell_margin || fv < cell_margin ||
          fv > 1.0 - cell_margin) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(i);
  }
  return out;
}

LossInstance make_loss_instance(Rng& rng, int n_targets, int image_size,
                                bool with_masks) {
  LossInstance inst;
  const long n = 48;
  const int d = 4;
  inst.prior = random_prior(rng, n, d);
  inst.s = 0.2 * rng.normal_vector(d);
  const PointMatrix cloud = generate(inst.prior, inst.s);

  const int hw = image_size;
  inst.K.fx = inst.K.fy = 0.9 * hw;
  inst.K.cx = inst.K.cy = 0.5 * (hw - 1);

  // Reference camera looking at the origin from a random direction.
  const Vec3 dir = rng.unit_vector();
  const Vec3 pos = 2.4 * dir;
  const Vec3 forward = -dir;
  const Vec3 hint = std::abs(forward.z()) > 0.99 ? Vec3::UnitX() : Vec3::UnitZ();
  const Vec3 right = hint.cross(forward).normalized();
  const Vec3 down = forward.cross(right);
  Mat3 c2w;
  c2w.col(0) = right;
  c2w.col(1) = down;
  c2w.col(2) = forward;
  inst.p0 = {log_so3(c2w.transpose()), -(c2w.transpose() * pos)};

  for (int l = 0; l < n_targets; ++l) {
    PoseTwist dp;
    dp.omega = rng.unit_vector() * rng.uniform(0.01, 0.06);
    dp.trans = 0.02 * Vec3(rng.normal(), rng.normal(), rng.normal());
    inst.dps.push_back(dp);
  }

  inst.frames.resize(n_targets + 1);
  for (auto& frame : inst.frames) {
    frame.image = smooth_image(rng, hw, hw);
    if (with_masks) {
      frame.mask = SilhouetteMask(hw, hw);
      const double cx = rng.uniform(hw * 0.3, hw * 0.7);
      const double cy = rng.uniform(hw * 0.3, hw * 0.7);
      const double radius = rng.uniform(hw * 0.15, hw * 0.3);
      for (int y = 0; y < hw; ++y) {
        for (int x = 0; x < hw; ++x) {
          const double dx = x - cx, dy = y - cy;
          frame.mask.set(x, y, dx * dx + dy * dy <= radius * radius);
        }
      }
    } else {
      frame.mask = SilhouetteMask(hw, hw);
    }
  }

  inst.options.upscale = 3;
  inst.frozen = compute_visibility(cloud, inst.p0, inst.dps, inst.K, hw, hw,
                                   inst.options);
  inst.frozen.reference.indices =
      filter_safe(cloud, inst.p0, inst.dps, inst.K, hw, hw,
                  inst.frozen.reference.indices);
  for (auto& target : inst.frozen.targets) {
    target.indices = filter_safe(cloud, inst.p0, inst.dps, inst.K, hw, hw,
                                 target.indices);
  }
  return inst;
}

// Near-tie rejection for the silhouette instances: checks the actual
// chamfer pairs the frozen sets produce.
bool silhouette_ties_ok(const LossInstance& inst) {
  const PointMatrix cloud = generate(inst.prior, inst.s);
  for (std::size_t l = 0; l < inst.dps.size(); ++l) {
    const RigidTransform t = compose(transform_of(inst.p0),
                                     transform_of(inst.dps[l]));
    std::vector<Vec2> proj;
    for (int i : inst.frozen.targets[l].indices) {
      const auto p =
          project_camera_point(t.apply(cloud.row(i).transpose()), inst.K,
                               1e-6);
      if (p) proj.push_back({p->uv.u, p->uv.v});
    }
    std::vector<Vec2> sil;
    for (const auto& u : mask_to_coords(inst.frames[l + 1].mask)) {
      sil.push_back({u.u, u.v});
    }
    if (proj.empty() || sil.empty()) return false;
    if (!chamfer_gaps_ok(sil, proj, 5e-3) ||
        !chamfer_gaps_ok(proj, sil, 5e-3)) {
      return false;
    }
  }
  return true;
}

template <typename LossFn>
double check_loss_gradients(Rng& rng, int n_targets, int image_size,
                            bool with_masks, bool need_tie_check,
                            const LossFn& loss) {
  for (int attempt = 0; attempt < 50; ++attempt) {
    LossInstance inst =
        make_loss_instance(rng, n_targets, image_size, with_masks);
    if (inst.frozen.reference.indices.size() < 8) continue;
    if (need_tie_check && !silhouette_ties_ok(inst)) continue;

    const ShapeGenerator gen = make_generator(inst.prior);
    const auto base = loss(inst, gen);

    const double h = 1e-6;
    double worst = 0.0;
    auto fd_block = [&](auto setter, int dim, const VecX& analytic) {
      VecX fd(dim);
      for (int k = 0; k < dim; ++k) {
        LossInstance plus = inst, minus = inst;
        setter(plus, k, h);
        setter(minus, k, -h);
        fd[k] = (loss(plus, gen).value - loss(minus, gen).value) / (2.0 * h);
      }
      worst = std::max(worst, rel_err(analytic, fd));
    };

    fd_block([](LossInstance& i, int k, double d) {
               if (k < 3) i.p0.omega[k] += d;
               else i.p0.trans[k - 3] += d;
             },
             6, base.grads_p0);
    for (std::size_t l = 0; l < inst.dps.size(); ++l) {
      fd_block([l](LossInstance& i, int k, double d) {
                 if (k < 3) i.dps[l].omega[k] += d;
                 else i.dps[l].trans[k - 3] += d;
               },
               6, base.grads_dps[l]);
    }
    fd_block([](LossInstance& i, int k, double d) { i.s[k] += d; },
             static_cast<int>(inst.s.size()), base.grads_style);
    return worst;
  }
  return 0.0;
}

struct LossEval {
  double value = 0.0;
  VecX grads_p0;
  std::vector<VecX> grads_dps;
  VecX grads_style;
};

LossEval eval_photometric(const LossInstance& inst, const ShapeGenerator& gen) {
  const auto r = photometric_loss(inst.frames, inst.p0, inst.dps, inst.s, gen,
                                  inst.K, inst.options, &inst.frozen);
  LossEval out;
  out.value = r.value;
  out.grads_p0 = r.grads.p0;
  for (const auto& g : r.grads.dps) out.grads_dps.push_back(g);
  out.grads_style = r.grads.style;
  return out;
}

LossEval eval_silhouette(const LossInstance& inst, const ShapeGenerator& gen) {
  const auto r = silhouette_loss(inst.frames, inst.p0, inst.dps, inst.s, gen,
                                 inst.K, inst.options, &inst.frozen);
  LossEval out;
  out.value = r.value;
  out.grads_p0 = r.grads.p0;
  for (const auto& g : r.grads.dps) out.grads_dps.push_back(g);
  out.grads_style = r.grads.style;
  return out;
}

LossEval eval_combined(const LossInstance& inst, const ShapeGenerator& gen) {
  LossWeights weights;
  weights.lambda = 0.01;
  const auto r = combined_loss(inst.frames, inst.p0, inst.dps, inst.s, gen,
                               inst.K, weights, inst.options, &inst.frozen);
  LossEval out;
  out.value = r.breakdown.l_total;
  out.grads_p0 = r.grads.p0;
  for (const auto& g : r.grads.dps) out.grads_dps.push_back(g);
  out.grads_style = r.grads.style;
  return out;
}

}  // namespace

std::vector<GradcheckSuite> run_gradcheck(std::uint64_t seed,
                                          int instances_per_suite) {
  std::vector<GradcheckSuite> suites;
  auto run = [&](const std::string& name, double tol, auto&& one_instance) {
    Rng rng(derive_seed(seed, std::hash<std::string>{}(name)));
    GradcheckSuite suite;
    suite.name = name;
    suite.tolerance = tol;
    suite.instances = instances_per_suite;
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < instances_per_suite; ++i) {
      suite.max_rel_err = std::max(suite.max_rel_err, one_instance(rng));
    }
    suite.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    suite.pass = suite.max_rel_err < tol;
    suites.push_back(suite);
  };

  run("exp_so3_action", 1e-5, check_exp_so3_action);
  run("project", 1e-5, check_project);
  run("project_composed", 1e-5, check_project_composed);
  run("sample_bilinear", 1e-6, check_bilinear);
  run("generate", 1e-6, check_generate);
  run("chamfer_2d", 1e-4, check_chamfer);
  run("photometric_loss", 1e-4, [&](Rng& rng) {
    return check_loss_gradients(rng, 2, 32, false, false, eval_photometric);
  });
  run("silhouette_loss", 1e-4, [&](Rng& rng) {
    return check_loss_gradients(rng, 1, 24, true, true, eval_silhouette);
  });
  run("combined_loss", 1e-4, [&](Rng& rng) {
    return check_loss_gradients(rng, 1, 24, true, true, eval_combined);
  });
  return suites;
}

bool all_pass(const std::vector<GradcheckSuite>& suites) {
  for (const auto& s : suites) {
    if (!s.pass) return false;
  }
  return true;
}

std::string format_gradcheck_table(const std::vector<GradcheckSuite>& suites) {
  std::ostringstream out;
  out << "suite                 instances  max_rel_err   tolerance  time_s  "
         "result\n";
  char line[160];
  for (const auto& s : suites) {
    std::snprintf(line, sizeof(line), "%-21s %9d  %11.3e  %10.0e  %6.1f  %s\n",
                  s.name.c_str(), s.instances, s.max_rel_err, s.tolerance,
                  s.seconds, s.pass ? "PASS" : "FAIL");
    out << line;
  }
  return out.str();
}

}  // namespace spba
