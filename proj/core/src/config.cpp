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

#include "spba/config.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "spba/fsio.hpp"

namespace spba {

using Json = nlohmann::ordered_json;

CameraIntrinsics CameraConfig::intrinsics() const {
  CameraIntrinsics K;
  const double half_fov = 0.5 * fov_deg * std::numbers::pi / 180.0;
  K.fx = 0.5 * width / std::tan(half_fov);
  K.fy = K.fx;
  K.cx = 0.5 * (width - 1);
  K.cy = 0.5 * (height - 1);
  return K;
}

namespace {

void require(bool ok, const char* field) {
  if (!ok) {
    throw std::invalid_argument(std::string("config: invalid ") + field);
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  require(config_version == kConfigVersion, "config_version");
  require(prior.style_dims >= 1, "prior.style_dims");
  require(prior.points >= 1, "prior.points");
  require(prior.train_shapes >= prior.style_dims + 1, "prior.train_shapes");
  for (int i = 0; i < kNumShapeParams; ++i) {
    require(prior.family.lo[i] <= prior.family.hi[i], "prior.family bounds");
  }
  require(camera.width >= 2 && camera.height >= 2, "camera size");
  require(camera.fov_deg > 0 && camera.fov_deg < 180, "camera.fov_deg");
  require(camera.distance_lo > 0 &&
              camera.distance_hi >= camera.distance_lo,
          "camera.distance range");
  require(camera.z_min > 0, "camera.z_min");
  require(sequence.frames >= 2, "sequence.frames");
  require(sequence.step_deg > 0, "sequence.step_deg");
  require(render.splat_radius_px > 0, "render.splat_radius_px");
  require(render.lights_lo >= 0 && render.lights_hi >= render.lights_lo,
          "render.lights range");
  require(render.coverage_lo >= 0 && render.coverage_hi <= 1 &&
              render.coverage_lo < render.coverage_hi,
          "render.coverage range");
  require(init_noise.rot_sigma_deg >= 0, "init_noise.rot_sigma_deg");
  require(init_noise.trans_sigma_frac >= 0, "init_noise.trans_sigma_frac");
  require(init_noise.style_sigma_frac >= 0, "init_noise.style_sigma_frac");
  require(weights.lambda >= 0, "weights.lambda");
  require(loss.upscale >= 1, "loss.upscale");
  require(optimizer.history >= 1, "optimizer.history");
  require(optimizer.max_outer_rounds >= 1, "optimizer.max_outer_rounds");
  require(optimizer.inner_steps >= 1, "optimizer.inner_steps");
  require(optimizer.delta_l_rel >= 0 && optimizer.delta_l_abs >= 0,
          "optimizer.delta_l");
  require(optimizer.wolfe_c1 > 0 && optimizer.wolfe_c1 < optimizer.wolfe_c2 &&
              optimizer.wolfe_c2 < 1,
          "optimizer.wolfe constants");
}

std::string config_to_json(const ExperimentConfig& c) {
  Json j;
  j["config_version"] = c.config_version;
  j["prior"] = {{"style_dims", c.prior.style_dims},
                {"points", c.prior.points},
                {"train_shapes", c.prior.train_shapes},
                {"family_lo", c.prior.family.lo},
                {"family_hi", c.prior.family.hi}};
  j["camera"] = {{"width", c.camera.width},
                 {"height", c.camera.height},
                 {"fov_deg", c.camera.fov_deg},
                 {"distance_lo", c.camera.distance_lo},
                 {"distance_hi", c.camera.distance_hi},
                 {"z_min", c.camera.z_min}};
  j["sequence"] = {{"frames", c.sequence.frames},
                   {"step_deg", c.sequence.step_deg}};
  j["render"] = {
      {"splat_radius_px", c.render.splat_radius_px},
      {"background_mode",
       c.render.background.mode == BackgroundMode::kChecker ? "checker"
                                                            : "constant"},
      {"background_color_a",
       {c.render.background.color_a.x(), c.render.background.color_a.y(),
        c.render.background.color_a.z()}},
      {"background_color_b",
       {c.render.background.color_b.x(), c.render.background.color_b.y(),
        c.render.background.color_b.z()}},
      {"background_cell_px", c.render.background.checker_cell_px},
      {"lights_lo", c.render.lights_lo},
      {"lights_hi", c.render.lights_hi},
      {"ambient_lo", c.render.ambient_lo},
      {"ambient_hi", c.render.ambient_hi},
      {"intensity_lo", c.render.intensity_lo},
      {"intensity_hi", c.render.intensity_hi},
      {"contrast_lo", c.render.contrast_lo},
      {"contrast_hi", c.render.contrast_hi},
      {"coverage_lo", c.render.coverage_lo},
      {"coverage_hi", c.render.coverage_hi}};
  j["init_noise"] = {{"rot_sigma_deg", c.init_noise.rot_sigma_deg},
                     {"trans_sigma_frac", c.init_noise.trans_sigma_frac},
                     {"style_sigma_frac", c.init_noise.style_sigma_frac}};
  j["loss"] = {
      {"lambda", c.weights.lambda},
      {"upscale", c.loss.upscale},
      {"z_min", c.loss.z_min},
      {"silhouette_visibility",
       c.loss.silhouette_visibility == SilhouetteVisibility::kTargetPose
           ? "target"
           : "reference"}};
  j["optimizer"] = {{"history", c.optimizer.history},
                    {"max_outer_rounds", c.optimizer.max_outer_rounds},
                    {"inner_steps", c.optimizer.inner_steps},
                    {"delta_l_rel", c.optimizer.delta_l_rel},
                    {"delta_l_abs", c.optimizer.delta_l_abs},
                    {"wolfe_c1", c.optimizer.wolfe_c1},
                    {"wolfe_c2", c.optimizer.wolfe_c2},
                    {"min_rel_decrease", c.optimizer.min_rel_decrease},
                    {"grad_tol", c.optimizer.grad_tol},
                    {"reverse_block_order", c.optimizer.reverse_block_order}};
  j["seed"] = c.seed;
  return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
  const Json j = Json::parse(text);
  ExperimentConfig c;
  c.config_version = j.at("config_version").get<int>();

  const auto& p = j.at("prior");
  c.prior.style_dims = p.at("style_dims").get<int>();
  c.prior.points = p.at("points").get<int>();
  c.prior.train_shapes = p.at("train_shapes").get<int>();
  for (int i = 0; i < kNumShapeParams; ++i) {
    c.prior.family.lo[i] = p.at("family_lo").at(i).get<double>();
    c.prior.family.hi[i] = p.at("family_hi").at(i).get<double>();
  }

  const auto& cam = j.at("camera");
  c.camera.width = cam.at("width").get<int>();
  c.camera.height = cam.at("height").get<int>();
  c.camera.fov_deg = cam.at("fov_deg").get<double>();
  c.camera.distance_lo = cam.at("distance_lo").get<double>();
  c.camera.distance_hi = cam.at("distance_hi").get<double>();
  c.camera.z_min = cam.at("z_min").get<double>();

  const auto& seq = j.at("sequence");
  c.sequence.frames = seq.at("frames").get<int>();
  c.sequence.step_deg = seq.at("step_deg").get<double>();

  const auto& r = j.at("render");
  c.render.splat_radius_px = r.at("splat_radius_px").get<double>();
  c.render.background.mode =
      r.at("background_mode").get<std::string>() == "checker"
          ? BackgroundMode::kChecker
          : BackgroundMode::kConstant;
  for (int i = 0; i < 3; ++i) {
    c.render.background.color_a[i] =
        r.at("background_color_a").at(i).get<double>();
    c.render.background.color_b[i] =
        r.at("background_color_b").at(i).get<double>();
  }
  c.render.background.checker_cell_px = r.at("background_cell_px").get<int>();
  c.render.lights_lo = r.at("lights_lo").get<int>();
  c.render.lights_hi = r.at("lights_hi").get<int>();
  c.render.ambient_lo = r.at("ambient_lo").get<double>();
  c.render.ambient_hi = r.at("ambient_hi").get<double>();
  c.render.intensity_lo = r.at("intensity_lo").get<double>();
  c.render.intensity_hi = r.at("intensity_hi").get<double>();
  c.render.contrast_lo = r.at("contrast_lo").get<double>();
  c.render.contrast_hi = r.at("contrast_hi").get<double>();
  c.render.coverage_lo = r.at("coverage_lo").get<double>();
  c.render.coverage_hi = r.at("coverage_hi").get<double>();

  const auto& n = j.at("init_noise");
  c.init_noise.rot_sigma_deg = n.at("rot_sigma_deg").get<double>();
  c.init_noise.trans_sigma_frac = n.at("trans_sigma_frac").get<double>();
  c.init_noise.style_sigma_frac = n.at("style_sigma_frac").get<double>();

  const auto& l = j.at("loss");
  c.weights.lambda = l.at("lambda").get<double>();
  c.loss.upscale = l.at("upscale").get<int>();
  c.loss.z_min = l.at("z_min").get<double>();
  c.loss.silhouette_visibility =
      l.at("silhouette_visibility").get<std::string>() == "target"
          ? SilhouetteVisibility::kTargetPose
          : SilhouetteVisibility::kReferencePose;

  const auto& o = j.at("optimizer");
  c.optimizer.history = o.at("history").get<int>();
  c.optimizer.max_outer_rounds = o.at("max_outer_rounds").get<int>();
  c.optimizer.inner_steps = o.at("inner_steps").get<int>();
  c.optimizer.delta_l_rel = o.at("delta_l_rel").get<double>();
  c.optimizer.delta_l_abs = o.at("delta_l_abs").get<double>();
  c.optimizer.wolfe_c1 = o.at("wolfe_c1").get<double>();
  c.optimizer.wolfe_c2 = o.at("wolfe_c2").get<double>();
  c.optimizer.min_rel_decrease = o.at("min_rel_decrease").get<double>();
  c.optimizer.grad_tol = o.at("grad_tol").get<double>();
  c.optimizer.reverse_block_order = o.at("reverse_block_order").get<bool>();

  c.seed = j.at("seed").get<std::uint64_t>();
  c.validate();
  return c;
}

void save_config(const std::string& path, const ExperimentConfig& config) {
  write_file_atomic(path, config_to_json(config));
}

ExperimentConfig load_config(const std::string& path) {
  return config_from_json(read_file(path));
}

}  // namespace spba
