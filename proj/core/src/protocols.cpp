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

#include "spba/protocols.hpp"

#include <sstream>
#include <stdexcept>

#include "spba/fsio.hpp"
#include "spba/parallel.hpp"
#include "spba/svg.hpp"

namespace spba {

SceneBundle truncate_scene(const SceneBundle& scene, int views) {
  if (views < 2 || views > static_cast<int>(scene.frames.size())) {
    throw std::invalid_argument("truncate_scene: bad view count");
  }
  SceneBundle out = scene;
  out.frames.resize(views);
  out.config.sequence.frames = views;
  return out;
}

AblationResult views_ablation(const std::vector<SceneBundle>& scenes,
                              const ShapePriorBundle& prior,
                              const ExperimentConfig& config,
                              const std::vector<int>& view_counts,
                              LossOption option, int jobs) {
  if (scenes.empty()) {
    throw std::invalid_argument("views_ablation: no scenes");
  }
  AblationResult result;
  const std::size_t per_count = scenes.size();
  result.trials.resize(view_counts.size() * per_count);

  std::vector<std::function<void()>> tasks;
  for (std::size_t c = 0; c < view_counts.size(); ++c) {
    for (std::size_t i = 0; i < per_count; ++i) {
      tasks.push_back([&, c, i] {
        const SceneBundle truncated =
            truncate_scene(scenes[i], view_counts[c]);
        result.trials[c * per_count + i] =
            run_pipeline(truncated, prior, config, option).trial;
      });
    }
  }
  run_parallel(jobs, tasks);

  for (std::size_t c = 0; c < view_counts.size(); ++c) {
    std::vector<double> rot_init, rot_final, style_init, style_final;
    for (std::size_t i = 0; i < per_count; ++i) {
      const TrialResult& t = result.trials[c * per_count + i];
      rot_init.push_back(t.init.rot_mean());
      rot_final.push_back(t.final_.rot_mean());
      style_init.push_back(t.init.style_err);
      style_final.push_back(t.final_.style_err);
    }
    AblationRow row;
    row.views = view_counts[c];
    row.trials = static_cast<int>(per_count);
    row.median_rot_init_deg = median(rot_init);
    row.median_rot_final_deg = median(rot_final);
    row.mean_rot_final_deg = mean(rot_final);
    row.median_style_init = median(style_init);
    row.median_style_final = median(style_final);
    result.rows.push_back(row);
  }
  return result;
}

void write_ablation_csv(const std::string& path,
                        const std::vector<AblationRow>& rows) {
  std::ostringstream out;
  out << "views,trials,median_rot_init_deg,median_rot_final_deg,"
         "mean_rot_final_deg,median_style_init,median_style_final\n";
  for (const auto& r : rows) {
    out << r.views << ',' << r.trials << ','
        << format_double(r.median_rot_init_deg) << ','
        << format_double(r.median_rot_final_deg) << ','
        << format_double(r.mean_rot_final_deg) << ','
        << format_double(r.median_style_init) << ','
        << format_double(r.median_style_final) << '\n';
  }
  write_file_atomic(path, out.str());
}

void write_ablation_svg(const std::string& rot_path,
                        const std::string& style_path,
                        const std::vector<AblationRow>& rows) {
  SvgPlot rot;
  rot.title = "Median rotation error vs view count";
  rot.x_label = "views";
  rot.y_label = "rotation error (deg)";
  SvgSeries rot_final{"final", "#c23b22", {}, {}};
  SvgSeries rot_init{"init", "#1f6fb2", {}, {}};
  for (const auto& r : rows) {
    rot_final.x.push_back(r.views);
    rot_final.y.push_back(r.median_rot_final_deg);
    rot_init.x.push_back(r.views);
    rot_init.y.push_back(r.median_rot_init_deg);
  }
  rot.series = {rot_init, rot_final};
  write_svg(rot_path, rot);

  SvgPlot style;
  style.title = "Median style error vs view count";
  style.x_label = "views";
  style.y_label = "style error";
  SvgSeries style_final{"final", "#c23b22", {}, {}};
  SvgSeries style_init{"init", "#1f6fb2", {}, {}};
  for (const auto& r : rows) {
    style_final.x.push_back(r.views);
    style_final.y.push_back(r.median_style_final);
    style_init.x.push_back(r.views);
    style_init.y.push_back(r.median_style_init);
  }
  style.series = {style_init, style_final};
  write_svg(style_path, style);
}

PairedTrials compare_loss_options(const std::vector<SceneBundle>& scenes,
                                  const ShapePriorBundle& prior,
                                  const ExperimentConfig& config, int jobs) {
  PairedTrials out;
  out.first.resize(scenes.size());
  out.second.resize(scenes.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    tasks.push_back([&, i] {
      out.first[i] =
          run_pipeline(scenes[i], prior, config, LossOption::kCombined).trial;
    });
    tasks.push_back([&, i] {
      out.second[i] =
          run_pipeline(scenes[i], prior, config, LossOption::kPhotometricOnly)
              .trial;
    });
  }
  run_parallel(jobs, tasks);
  return out;
}

PairedTrials compare_prior_vs_direct(const std::vector<SceneBundle>& scenes,
                                     const ShapePriorBundle& prior,
                                     const ExperimentConfig& config,
                                     int jobs) {
  PairedTrials out;
  out.first.resize(scenes.size());
  out.second.resize(scenes.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    tasks.push_back([&, i] {
      out.first[i] =
          run_pipeline(scenes[i], prior, config, LossOption::kCombined).trial;
    });
    tasks.push_back([&, i] {
      out.second[i] = run_direct_pipeline(scenes[i], prior, config).trial;
    });
  }
  run_parallel(jobs, tasks);
  return out;
}

}  // namespace spba
