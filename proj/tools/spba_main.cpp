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

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

#include "spba/evaluation.hpp"
#include "spba/fsio.hpp"
#include "spba/gradcheck.hpp"
#include "spba/log.hpp"
#include "spba/parallel.hpp"
#include "spba/pipeline.hpp"
#include "spba/protocols.hpp"
#include "spba/svg.hpp"

namespace {

namespace fs = std::filesystem;
using namespace spba;

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
  bool force = false;
  std::string log_level = "info";
};

ExperimentConfig resolve_config(const GlobalArgs& args) {
  ExperimentConfig config;
  if (!args.config_path.empty()) config = load_config(args.config_path);
  if (args.seed_set) config.seed = args.seed;
  config.validate();
  return config;
}

// Scene directories under a dataset root, sorted by numeric id.
std::vector<std::string> list_scene_dirs(const std::string& root) {
  std::vector<std::pair<int, std::string>> found;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    const std::string name = entry.path().filename().string();
    if (name.rfind("scene_", 0) != 0) continue;
    found.emplace_back(std::stoi(name.substr(6)), entry.path().string());
  }
  std::sort(found.begin(), found.end());
  std::vector<std::string> out;
  for (auto& [id, path] : found) out.push_back(path);
  if (out.empty()) {
    throw std::invalid_argument("no scene_<id> directories under " + root);
  }
  return out;
}

std::vector<SceneBundle> load_scenes(const std::vector<std::string>& dirs) {
  std::vector<SceneBundle> scenes(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) scenes[i] = load_scene(dirs[i]);
  return scenes;
}

LossOption parse_loss_option(const std::string& name) {
  if (name == "combined") return LossOption::kCombined;
  if (name == "photometric") return LossOption::kPhotometricOnly;
  throw std::invalid_argument("unknown loss option: " + name);
}

int cmd_fit_prior(const GlobalArgs& args, const std::string& out_path) {
  const ExperimentConfig config = resolve_config(args);
  SPBA_LOG_INFO("fitting prior: d=", config.prior.style_dims,
                " N=", config.prior.points,
                " shapes=", config.prior.train_shapes);
  const ShapePriorBundle bundle =
      train_prior(config.prior.family, config.prior.train_shapes,
                  config.prior.style_dims, config.prior.points, config.seed);
  ensure_directory(fs::path(out_path).parent_path().string().empty()
                       ? "."
                       : fs::path(out_path).parent_path().string());
  save_prior(out_path, bundle);
  SPBA_LOG_INFO("prior written to ", out_path);
  return 0;
}

int cmd_synth(const GlobalArgs& args, const std::string& prior_path,
              int n_scenes, bool print_config) {
  const ExperimentConfig config = resolve_config(args);
  if (print_config) {
    std::cout << config_to_json(config);
    return 0;
  }
  ShapePriorBundle prior;
  if (file_exists(prior_path)) {
    prior = load_prior(prior_path);
  } else {
    SPBA_LOG_INFO("prior file missing, fitting inline: ", prior_path);
    prior = train_prior(config.prior.family, config.prior.train_shapes,
                        config.prior.style_dims, config.prior.points,
                        config.seed);
    save_prior(prior_path, prior);
  }
  synth_dataset(prior, config, n_scenes, args.out_dir, args.jobs, args.force);
  SPBA_LOG_INFO("wrote ", n_scenes, " scenes under ", args.out_dir);
  return 0;
}

int cmd_run(const GlobalArgs& args, const std::string& scene_dir,
            const std::string& prior_path, const std::string& loss_name) {
  const ShapePriorBundle prior = load_prior(prior_path);
  const SceneBundle scene = load_scene(scene_dir);
  ExperimentConfig config = scene.config;
  if (!args.config_path.empty()) config = load_config(args.config_path);

  PipelineResult result;
  if (loss_name == "direct") {
    if (!args.force && file_exists(args.out_dir + "/result.json")) {
      throw std::runtime_error("trial exists (use --force): " + args.out_dir);
    }
    result = run_direct_pipeline(scene, prior, config);
    save_trial(args.out_dir, result, true);
  } else {
    result = run_trial_to_dir(scene_dir, prior, config,
                              parse_loss_option(loss_name), args.out_dir,
                              args.force);
  }
  return 0;
}

void write_success_curves(const std::string& out_dir,
                          const std::vector<TrialResult>& trials) {
  std::vector<double> rot_final, style_final;
  for (const auto& t : trials) {
    for (double e : t.final_.rot_err_deg) rot_final.push_back(e);
    style_final.push_back(t.final_.style_err);
  }
  std::vector<double> rot_thresholds;
  for (int i = 0; i <= 60; ++i) rot_thresholds.push_back(0.5 * i);  // 0..30 deg
  const SuccessCurve rot = success_rate_curve(rot_final, rot_thresholds);
  write_curve_csv(out_dir + "/curves_rotation.csv", rot);

  const double style_hi =
      10.0 * *std::min_element(style_final.begin(), style_final.end());
  std::vector<double> style_thresholds;
  for (int i = 0; i <= 50; ++i) {
    style_thresholds.push_back(style_hi * i / 50.0);
  }
  const SuccessCurve style = success_rate_curve(style_final, style_thresholds);
  write_curve_csv(out_dir + "/curves_style.csv", style);

  SvgPlot plot;
  plot.title = "Success rate under rotation-error threshold";
  plot.x_label = "threshold (deg)";
  plot.y_label = "success rate";
  SvgSeries series{"final", "#c23b22", rot.thresholds, rot.fraction};
  plot.series = {series};
  write_svg(out_dir + "/curves_rotation.svg", plot);

  SvgPlot splot;
  splot.title = "Success rate under style-error threshold";
  splot.x_label = "threshold";
  splot.y_label = "success rate";
  SvgSeries sseries{"final", "#1f6fb2", style.thresholds, style.fraction};
  splot.series = {sseries};
  write_svg(out_dir + "/curves_style.svg", splot);
}

int cmd_eval(const GlobalArgs& args, const std::string& scenes_dir,
             const std::string& prior_path, const std::string& loss_name) {
  const ShapePriorBundle prior = load_prior(prior_path);
  const auto dirs = list_scene_dirs(scenes_dir);
  const auto scenes = load_scenes(dirs);
  const LossOption option = parse_loss_option(loss_name);

  ensure_directory(args.out_dir);
  std::vector<TrialResult> trials(scenes.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    tasks.push_back([&, i] {
      const ExperimentConfig config = !args.config_path.empty()
                                          ? load_config(args.config_path)
                                          : scenes[i].config;
      PipelineResult result = run_pipeline(scenes[i], prior, config, option);
      const std::string trial_dir =
          args.out_dir + "/trial_" + std::to_string(scenes[i].id);
      save_trial(trial_dir, result, args.force || true);
      trials[i] = result.trial;
    });
  }
  run_parallel(args.jobs, tasks);

  write_trials_csv(args.out_dir + "/trials.csv", trials);
  write_success_curves(args.out_dir, trials);
  SPBA_LOG_INFO("results under ", args.out_dir);
  return 0;
}

int cmd_ablate_views(const GlobalArgs& args, const std::string& scenes_dir,
                     const std::string& prior_path,
                     std::vector<int> view_counts,
                     const std::string& loss_name) {
  const ShapePriorBundle prior = load_prior(prior_path);
  const auto scenes = load_scenes(list_scene_dirs(scenes_dir));
  const ExperimentConfig config =
      !args.config_path.empty() ? load_config(args.config_path)
                                : scenes.front().config;
  if (view_counts.empty()) view_counts = {2, 5, 10, 15};

  const AblationResult result =
      views_ablation(scenes, prior, config, view_counts,
                     parse_loss_option(loss_name), args.jobs);
  ensure_directory(args.out_dir);
  write_ablation_csv(args.out_dir + "/ablation_views.csv", result.rows);
  write_ablation_svg(args.out_dir + "/ablation_views_rotation.svg",
                     args.out_dir + "/ablation_views_style.svg", result.rows);
  write_trials_csv(args.out_dir + "/ablation_trials.csv", result.trials);
  for (const auto& row : result.rows) {
    SPBA_LOG_INFO("views=", row.views,
                  " median rot (deg): ", row.median_rot_init_deg, " -> ",
                  row.median_rot_final_deg,
                  ", median style: ", row.median_style_init, " -> ",
                  row.median_style_final);
  }
  return 0;
}

int cmd_compare_losses(const GlobalArgs& args, const std::string& scenes_dir,
                       const std::string& prior_path) {
  const ShapePriorBundle prior = load_prior(prior_path);
  const auto scenes = load_scenes(list_scene_dirs(scenes_dir));
  const ExperimentConfig config =
      !args.config_path.empty() ? load_config(args.config_path)
                                : scenes.front().config;
  const PairedTrials paired =
      compare_loss_options(scenes, prior, config, args.jobs);
  ensure_directory(args.out_dir);
  std::vector<TrialResult> all = paired.first;
  all.insert(all.end(), paired.second.begin(), paired.second.end());
  write_trials_csv(args.out_dir + "/compare_losses.csv", all);
  int combined_better = 0;
  for (std::size_t i = 0; i < paired.first.size(); ++i) {
    combined_better +=
        paired.first[i].final_.loss.l_cd <= paired.second[i].final_.loss.l_cd;
  }
  SPBA_LOG_INFO("combined loss had lower/equal final L_CD on ",
                combined_better, "/", paired.first.size(), " scenes");
  return 0;
}

int cmd_compare_direct(const GlobalArgs& args, const std::string& scenes_dir,
                       const std::string& prior_path) {
  const ShapePriorBundle prior = load_prior(prior_path);
  const auto scenes = load_scenes(list_scene_dirs(scenes_dir));
  const ExperimentConfig config =
      !args.config_path.empty() ? load_config(args.config_path)
                                : scenes.front().config;
  const PairedTrials paired =
      compare_prior_vs_direct(scenes, prior, config, args.jobs);
  ensure_directory(args.out_dir);
  std::vector<TrialResult> all = paired.first;
  all.insert(all.end(), paired.second.begin(), paired.second.end());
  write_trials_csv(args.out_dir + "/compare_direct.csv", all);
  int prior_better = 0;
  for (std::size_t i = 0; i < paired.first.size(); ++i) {
    prior_better +=
        paired.first[i].final_.style_err <= paired.second[i].final_.style_err;
  }
  SPBA_LOG_INFO("prior-based had lower/equal final style error on ",
                prior_better, "/", paired.first.size(), " scenes");
  return 0;
}

int cmd_gradcheck(std::uint64_t seed, int instances) {
  const auto suites = run_gradcheck(seed, instances);
  std::cout << format_gradcheck_table(suites);
  return all_pass(suites) ? 0 : 1;
}

int cmd_dump_visible(const std::string& scene_dir, int frame,
                     const std::string& prior_path,
                     const std::string& out_path) {
  const SceneBundle scene = load_scene(scene_dir);
  const ShapePriorBundle prior = load_prior(prior_path);
  if (frame < 0 || frame >= static_cast<int>(scene.frames.size())) {
    throw std::invalid_argument("frame index out of range");
  }
  const PointMatrix cloud = generate(prior.prior, scene.gt_style);
  const VisibleSet set = visible_subset(
      cloud, scene.frames[frame].gt_pose, scene.K, scene.config.camera.height,
      scene.config.camera.width, scene.config.loss.upscale,
      scene.config.loss.z_min);
  std::ostringstream out;
  out << "[";
  for (std::size_t i = 0; i < set.indices.size(); ++i) {
    out << (i ? "," : "") << set.indices[i];
  }
  out << "]\n";
  write_file_atomic(out_path, out.str());
  SPBA_LOG_INFO("wrote ", set.indices.size(), " visible indices to ",
                out_path);
  return 0;
}

int validate_scene_dir(const std::string& dir) {
  const SceneBundle scene = load_scene(dir);
  int failures = 0;
  if (scene.frames.size() != static_cast<std::size_t>(
                                 scene.config.sequence.frames)) {
    SPBA_LOG_ERROR(dir, ": frame count != config");
    ++failures;
  }
  for (const auto& frame : scene.frames) {
    if (frame.mask.height != frame.image.height ||
        frame.mask.width != frame.image.width) {
      SPBA_LOG_ERROR(dir, ": mask/image size mismatch at frame ", frame.index);
      ++failures;
    }
    for (float v : frame.image.data) {
      if (!(v >= 0.0f && v <= 1.0f)) {
        SPBA_LOG_ERROR(dir, ": image value outside [0,1]");
        ++failures;
        break;
      }
    }
  }
  const double step = scene.config.sequence.step_deg;
  for (std::size_t l = 1; l < scene.frames.size(); ++l) {
    const double err = geodesic_rotation_error_deg(
        exp_so3(scene.frames[l - 1].gt_pose.omega),
        exp_so3(scene.frames[l].gt_pose.omega));
    if (std::abs(err - step) > 1e-6) {
      SPBA_LOG_ERROR(dir, ": consecutive pose step ", err, " != ", step);
      ++failures;
    }
  }
  if (failures == 0) SPBA_LOG_INFO(dir, ": scene OK");
  return failures;
}

int validate_prior_file(const std::string& path) {
  const ShapePriorBundle bundle = load_prior(path);
  int failures = 0;
  const int d = bundle.dims();
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      const double dot =
          Eigen::Map<const VecX>(bundle.prior.basis[a].data(),
                                 bundle.prior.basis[a].size())
              .dot(Eigen::Map<const VecX>(bundle.prior.basis[b].data(),
                                          bundle.prior.basis[b].size()));
      const double want = a == b ? 1.0 : 0.0;
      if (std::abs(dot - want) > 1e-8) {
        SPBA_LOG_ERROR(path, ": basis not orthonormal at (", a, ",", b, ")");
        ++failures;
      }
    }
  }
  if (failures == 0) SPBA_LOG_INFO(path, ": prior OK");
  return failures;
}

int cmd_validate(const std::vector<std::string>& paths) {
  int failures = 0;
  for (const auto& path : paths) {
    if (fs::is_directory(path)) {
      if (file_exists(path + "/gt.json")) {
        failures += validate_scene_dir(path);
      } else {
        // A dataset root: validate every scene under it.
        for (const auto& dir : list_scene_dirs(path)) {
          failures += validate_scene_dir(dir);
        }
      }
    } else if (file_exists(path)) {
      failures += validate_prior_file(path);
    } else {
      SPBA_LOG_ERROR("no such path: ", path);
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shape-prior photometric bundle adjustment"};
  app.require_subcommand(1);

  GlobalArgs globals;
  app.add_option("--config", globals.config_path, "experiment config JSON");
  app.add_option("--out-dir", globals.out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", globals.seed, "override seed");
  app.add_option("--jobs", globals.jobs, "worker pool size");
  app.add_flag("--force", globals.force, "overwrite existing outputs");
  app.add_option("--log-level", globals.log_level, "debug|info|warn|error");

  std::string prior_path = "prior.spba";
  std::string scene_dir;
  std::string scenes_dir;
  std::string loss_name = "combined";
  std::string out_path;
  int n_scenes = 1;
  int frame = 0;
  bool print_config = false;
  int instances = 1000;
  std::vector<int> view_counts;
  std::vector<std::string> validate_paths;

  auto* fit = app.add_subcommand("fit-prior", "fit the PCA shape prior");
  fit->add_option("--out", out_path, "output prior file")->required();

  auto* synth = app.add_subcommand("synth", "synthesize scene datasets");
  synth->add_option("--prior", prior_path, "prior file (fit inline if absent)");
  synth->add_option("--scenes", n_scenes, "number of scenes");
  synth->add_flag("--print-config", print_config,
                  "print the full config with defaults and exit");

  auto* run = app.add_subcommand("run", "run one reconstruction trial");
  run->add_option("--scene", scene_dir, "scene directory")->required();
  run->add_option("--prior", prior_path, "prior file")->required();
  run->add_option("--loss", loss_name, "combined|photometric|direct");

  auto* eval = app.add_subcommand("eval", "run trials over a dataset");
  eval->add_option("--scenes", scenes_dir, "dataset root")->required();
  eval->add_option("--prior", prior_path, "prior file")->required();
  eval->add_option("--loss", loss_name, "combined|photometric");

  auto* ablate = app.add_subcommand("ablate-views", "view-count ablation");
  ablate->add_option("--scenes", scenes_dir, "dataset root")->required();
  ablate->add_option("--prior", prior_path, "prior file")->required();
  ablate->add_option("--views", view_counts, "view counts (default 2 5 10 15)");
  ablate->add_option("--loss", loss_name, "combined|photometric");

  auto* cmp_loss =
      app.add_subcommand("compare-losses", "combined vs photometric-only");
  cmp_loss->add_option("--scenes", scenes_dir, "dataset root")->required();
  cmp_loss->add_option("--prior", prior_path, "prior file")->required();

  auto* cmp_direct =
      app.add_subcommand("compare-direct", "prior vs direct point optimization");
  cmp_direct->add_option("--scenes", scenes_dir, "dataset root")->required();
  cmp_direct->add_option("--prior", prior_path, "prior file")->required();

  auto* gc = app.add_subcommand("gradcheck",
                                "finite-difference gradient suites");
  gc->add_option("--instances", instances, "instances per suite");

  auto* dump = app.add_subcommand("dump-visible",
                                  "dump a frame's visible index set");
  dump->add_option("--scene", scene_dir, "scene directory")->required();
  dump->add_option("--frame", frame, "frame index");
  dump->add_option("--prior", prior_path, "prior file")->required();
  dump->add_option("--out", out_path, "output JSON path")->required();

  auto* validate =
      app.add_subcommand("validate", "re-check persisted artifact invariants");
  validate->add_option("paths", validate_paths, "scene dirs / dataset roots / "
                                                "prior files")
      ->required();

  // Global flags are accepted after the subcommand name too.
  for (auto* sub : app.get_subcommands(/*filter=*/[](const CLI::App*) {
         return true;
       })) {
    sub->fallthrough();
  }

  CLI11_PARSE(app, argc, argv);
  globals.seed_set = seed_opt->count() > 0;
  if (!set_log_level(globals.log_level)) {
    std::cerr << "unknown log level: " << globals.log_level << "\n";
    return 1;
  }

  try {
    if (fit->parsed()) return cmd_fit_prior(globals, out_path);
    if (synth->parsed()) {
      return cmd_synth(globals, prior_path, n_scenes, print_config);
    }
    if (run->parsed()) {
      return cmd_run(globals, scene_dir, prior_path, loss_name);
    }
    if (eval->parsed()) {
      return cmd_eval(globals, scenes_dir, prior_path, loss_name);
    }
    if (ablate->parsed()) {
      return cmd_ablate_views(globals, scenes_dir, prior_path, view_counts,
                              loss_name);
    }
    if (cmp_loss->parsed()) {
      return cmd_compare_losses(globals, scenes_dir, prior_path);
    }
    if (cmp_direct->parsed()) {
      return cmd_compare_direct(globals, scenes_dir, prior_path);
    }
    if (gc->parsed()) {
      return cmd_gradcheck(globals.seed_set ? globals.seed : 12345, instances);
    }
    if (dump->parsed()) {
      return cmd_dump_visible(scene_dir, frame, prior_path, out_path);
    }
    if (validate->parsed()) return cmd_validate(validate_paths);
  } catch (const std::invalid_argument& e) {
    SPBA_LOG_ERROR(e.what());
    return 1;
  } catch (const std::exception& e) {
    SPBA_LOG_ERROR(e.what());
    return 2;
  }
  return 0;
}
