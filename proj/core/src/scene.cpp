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

#include "spba/scene.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "spba/fsio.hpp"
#include "spba/image_io.hpp"
#include "spba/parallel.hpp"
#include "spba/ply.hpp"
#include "spba/random.hpp"
#include "spba/rasterizer.hpp"

namespace spba {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

// Seed streams for the independent stages of scene construction.
constexpr std::uint64_t kStyleStream = 1;
constexpr std::uint64_t kLightStream = 2;
constexpr std::uint64_t kPoseStream = 3;
constexpr std::uint64_t kInitStream = 4;

// Camera-to-world orientation looking from `position` toward `target`,
// rolled by `roll` about the optical axis. Columns are (right, down,
// forward); the extrinsic pair is its transpose.
Mat3 look_at(const Vec3& position, const Vec3& target, double roll) {
  const Vec3 forward = (target - position).normalized();
  const Vec3 hint =
      std::abs(forward.dot(Vec3::UnitZ())) > 0.99 ? Vec3::UnitX()
                                                  : Vec3::UnitZ();
  const Vec3 right = hint.cross(forward).normalized();
  const Vec3 down = forward.cross(right);
  Mat3 c2w;
  c2w.col(0) = right;
  c2w.col(1) = down;
  c2w.col(2) = forward;
  // Roll about the forward axis.
  return c2w * exp_so3(Vec3(0, 0, roll));
}

PoseTwist extrinsics_of(const Mat3& c2w, const Vec3& position) {
  const Mat3 rotation = c2w.transpose();
  return {log_so3(rotation), -(rotation * position)};
}

PointMatrix contrast_albedo(const PointMatrix& albedo, double contrast) {
  const Eigen::RowVector3d mean = albedo.colwise().mean();
  PointMatrix out = albedo;
  for (long i = 0; i < out.rows(); ++i) {
    out.row(i) = mean + contrast * (albedo.row(i) - mean);
  }
  return out.cwiseMax(0.0).cwiseMin(1.0);
}

nlohmann::ordered_json pose_json(const PoseTwist& pose) {
  return {{"omega", {pose.omega.x(), pose.omega.y(), pose.omega.z()}},
          {"trans", {pose.trans.x(), pose.trans.y(), pose.trans.z()}}};
}

PoseTwist pose_of_json(const nlohmann::json& j) {
  PoseTwist p;
  for (int i = 0; i < 3; ++i) {
    p.omega[i] = j.at("omega").at(i).get<double>();
    p.trans[i] = j.at("trans").at(i).get<double>();
  }
  return p;
}

}  // namespace

PoseTwist relative_pose(const PoseTwist& reference, const PoseTwist& target) {
  const RigidTransform t0 = transform_of(reference);
  const RigidTransform tl = transform_of(target);
  const Mat3 dr = tl.rotation * t0.rotation.transpose();
  return {log_so3(dr), tl.translation - dr * t0.translation};
}

SceneBundle synthesize_scene(const ShapePriorBundle& prior,
                             const ExperimentConfig& config, int scene_id) {
  config.validate();
  SceneBundle scene;
  scene.config = config;
  scene.id = scene_id;
  scene.seed = derive_seed(config.seed, 1000003ULL * scene_id);
  scene.K = config.camera.intrinsics();

  // Ground-truth style from the training coefficient distribution.
  {
    Rng rng(derive_seed(scene.seed, kStyleStream));
    scene.gt_style = StyleVector::Zero(prior.dims());
    for (int k = 0; k < prior.dims(); ++k) {
      const double scale = prior.prior.mode_scales[k];
      scene.gt_style[k] =
          std::clamp(rng.normal(0.0, scale), -2.0 * scale, 2.0 * scale);
    }
  }
  scene.gt_cloud = generate(prior.prior, scene.gt_style);
  scene.prior_mode_scales = prior.prior.mode_scales;

  // Lighting and texture contrast, fixed within the sequence.
  {
    Rng rng(derive_seed(scene.seed, kLightStream));
    const int n_lights =
        config.render.lights_lo +
        static_cast<int>(rng.uniform_index(
            config.render.lights_hi - config.render.lights_lo + 1));
    scene.lighting.ambient =
        rng.uniform(config.render.ambient_lo, config.render.ambient_hi);
    for (int i = 0; i < n_lights; ++i) {
      DirectionalLight light;
      light.direction = rng.unit_vector();
      light.intensity = rng.uniform(config.render.intensity_lo,
                                    config.render.intensity_hi) /
                        std::max(1, n_lights);
      scene.lighting.lights.push_back(light);
    }
    scene.texture_contrast =
        rng.uniform(config.render.contrast_lo, config.render.contrast_hi);
  }

  PointAttributes attrs;
  attrs.albedo = contrast_albedo(prior.attrs.albedo, scene.texture_contrast);
  attrs.normals = prior.attrs.normals;

  RasterizerOptions raster;
  raster.splat_radius_px = config.render.splat_radius_px;
  raster.z_min = config.camera.z_min;
  raster.background = config.render.background;

  const Vec3 centroid = scene.gt_cloud.colwise().mean().transpose();
  const int h = config.camera.height;
  const int w = config.camera.width;

  // Reference pose: rejection sample on silhouette coverage.
  Rng rng(derive_seed(scene.seed, kPoseStream));
  PoseTwist p0;
  Vec3 position = Vec3::Zero();
  Mat3 c2w = Mat3::Identity();
  bool accepted = false;
  for (int attempt = 0; attempt < 1000 && !accepted; ++attempt) {
    scene.camera_distance =
        rng.uniform(config.camera.distance_lo, config.camera.distance_hi);
    const Vec3 dir = rng.unit_vector();
    const double roll = rng.uniform(0.0, 2.0 * std::numbers::pi);
    position = centroid + scene.camera_distance * dir;
    c2w = look_at(position, centroid, roll);
    p0 = extrinsics_of(c2w, position);
    const RenderResult render = rasterize(scene.gt_cloud, attrs, p0, scene.K,
                                          h, w, scene.lighting, raster);
    const double coverage =
        static_cast<double>(render.mask.count()) / (h * w);
    accepted = coverage >= config.render.coverage_lo &&
               coverage <= config.render.coverage_hi;
  }
  if (!accepted) {
    throw std::runtime_error(
        "synthesize_scene: coverage rejection sampling exhausted (scene " +
        std::to_string(scene_id) + ")");
  }

  // Camera orbit: step_deg increments about a random axis through the
  // object centroid.
  const Vec3 axis = rng.unit_vector();
  scene.frames.reserve(config.sequence.frames);
  for (int l = 0; l < config.sequence.frames; ++l) {
    const Mat3 orbit = exp_so3(axis * (l * config.sequence.step_deg *
                                       kDegToRad));
    const Vec3 pos_l = centroid + orbit * (position - centroid);
    const Mat3 c2w_l = orbit * c2w;
    Frame frame;
    frame.index = l;
    frame.gt_pose = extrinsics_of(c2w_l, pos_l);
    RenderResult render = rasterize(scene.gt_cloud, attrs, frame.gt_pose,
                                    scene.K, h, w, scene.lighting, raster);
    frame.image = std::move(render.image);
    frame.mask = std::move(render.mask);
    scene.frames.push_back(std::move(frame));
  }
  return scene;
}

void save_scene(const std::string& dir, const SceneBundle& scene) {
  ensure_directory(dir);
  for (const auto& frame : scene.frames) {
    const std::string stem = dir + "/frame_" + std::to_string(frame.index);
    write_png(stem + ".png", frame.image);
    write_image_raw(stem + ".raw", frame.image);
    write_pgm(stem + ".pgm", frame.mask);
  }

  nlohmann::ordered_json gt;
  gt["id"] = scene.id;
  gt["seed"] = scene.seed;
  gt["camera_distance"] = scene.camera_distance;
  gt["texture_contrast"] = scene.texture_contrast;
  gt["intrinsics"] = {{"fx", scene.K.fx},
                      {"fy", scene.K.fy},
                      {"cx", scene.K.cx},
                      {"cy", scene.K.cy}};
  gt["gt_style"] = std::vector<double>(
      scene.gt_style.data(), scene.gt_style.data() + scene.gt_style.size());
  gt["prior_mode_scales"] = std::vector<double>(
      scene.prior_mode_scales.data(),
      scene.prior_mode_scales.data() + scene.prior_mode_scales.size());
  nlohmann::ordered_json lights = nlohmann::ordered_json::array();
  for (const auto& light : scene.lighting.lights) {
    lights.push_back({{"direction",
                       {light.direction.x(), light.direction.y(),
                        light.direction.z()}},
                      {"intensity", light.intensity}});
  }
  gt["lighting"] = {{"ambient", scene.lighting.ambient}, {"lights", lights}};
  nlohmann::ordered_json poses = nlohmann::ordered_json::array();
  for (const auto& frame : scene.frames) poses.push_back(pose_json(frame.gt_pose));
  gt["poses"] = poses;
  write_file_atomic(dir + "/gt.json", gt.dump(2) + "\n");

  write_ply(dir + "/cloud.ply", scene.gt_cloud,
            PointMatrix::Zero(scene.gt_cloud.rows(), 3));
  save_config(dir + "/config.json", scene.config);
}

SceneBundle load_scene(const std::string& dir) {
  SceneBundle scene;
  scene.config = load_config(dir + "/config.json");
  const auto gt = nlohmann::json::parse(read_file(dir + "/gt.json"));
  scene.id = gt.at("id").get<int>();
  scene.seed = gt.at("seed").get<std::uint64_t>();
  scene.camera_distance = gt.at("camera_distance").get<double>();
  scene.texture_contrast = gt.at("texture_contrast").get<double>();
  scene.K.fx = gt.at("intrinsics").at("fx").get<double>();
  scene.K.fy = gt.at("intrinsics").at("fy").get<double>();
  scene.K.cx = gt.at("intrinsics").at("cx").get<double>();
  scene.K.cy = gt.at("intrinsics").at("cy").get<double>();
  const auto& style = gt.at("gt_style");
  scene.gt_style = StyleVector(style.size());
  for (std::size_t k = 0; k < style.size(); ++k) {
    scene.gt_style[k] = style.at(k).get<double>();
  }
  const auto& scales = gt.at("prior_mode_scales");
  scene.prior_mode_scales = VecX(scales.size());
  for (std::size_t k = 0; k < scales.size(); ++k) {
    scene.prior_mode_scales[k] = scales.at(k).get<double>();
  }
  scene.lighting.ambient = gt.at("lighting").at("ambient").get<double>();
  for (const auto& l : gt.at("lighting").at("lights")) {
    DirectionalLight light;
    for (int i = 0; i < 3; ++i) {
      light.direction[i] = l.at("direction").at(i).get<double>();
    }
    light.intensity = l.at("intensity").get<double>();
    scene.lighting.lights.push_back(light);
  }

  scene.gt_cloud = read_ply(dir + "/cloud.ply").points;

  const auto& poses = gt.at("poses");
  const int n_frames = static_cast<int>(poses.size());
  for (int l = 0; l < n_frames; ++l) {
    Frame frame;
    frame.index = l;
    frame.gt_pose = pose_of_json(poses.at(l));
    const std::string stem = dir + "/frame_" + std::to_string(l);
    frame.image = read_image_raw(stem + ".raw");
    frame.mask = read_pgm(stem + ".pgm");
    scene.frames.push_back(std::move(frame));
  }
  if (scene.frames.empty()) {
    throw std::runtime_error("load_scene: no frames in " + dir);
  }
  return scene;
}

void synth_dataset(const ShapePriorBundle& prior,
                   const ExperimentConfig& config, int n_scenes,
                   const std::string& out_dir, int jobs, bool force) {
  config.validate();
  ensure_directory(out_dir);
  std::vector<std::function<void()>> tasks;
  for (int id = 0; id < n_scenes; ++id) {
    tasks.push_back([&, id] {
      const std::string dir = out_dir + "/scene_" + std::to_string(id);
      if (!force && file_exists(dir + "/gt.json")) {
        throw std::runtime_error("scene exists (use --force): " + dir);
      }
      save_scene(dir, synthesize_scene(prior, config, id));
    });
  }
  run_parallel(jobs, tasks);
}

Initialization initialize(const SceneBundle& scene,
                          const ExperimentConfig& config, std::uint64_t seed) {
  Rng rng(derive_seed(seed, kInitStream));
  Initialization out;

  const PoseTwist& gt_p0 = scene.frames.front().gt_pose;
  const double angle =
      std::abs(rng.normal(0.0, config.init_noise.rot_sigma_deg * kDegToRad));
  const Vec3 axis = rng.unit_vector();
  const Mat3 rotation = exp_so3(axis * angle) * exp_so3(gt_p0.omega);
  const double trans_sigma =
      config.init_noise.trans_sigma_frac * scene.camera_distance;
  Vec3 trans_noise;
  for (int i = 0; i < 3; ++i) trans_noise[i] = rng.normal(0.0, trans_sigma);

  out.state.p0 = PoseTwist{log_so3(rotation), gt_p0.trans + trans_noise};
  out.state.dps.assign(scene.frames.size() - 1, PoseTwist::identity());

  StyleVector noise = StyleVector::Zero(scene.gt_style.size());
  for (int k = 0; k < noise.size(); ++k) {
    noise[k] = rng.normal(0.0, config.init_noise.style_sigma_frac *
                                   scene.prior_mode_scales[k]);
  }
  out.state.s = scene.gt_style + noise;

  out.rot_noise_deg = angle / kDegToRad;
  out.trans_noise_norm = trans_noise.norm();
  out.style_noise_norm = noise.norm();
  return out;
}

}  // namespace spba
