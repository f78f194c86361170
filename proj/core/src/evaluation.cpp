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

#include "spba/evaluation.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "spba/fsio.hpp"

namespace spba {

double TrialSnapshot::rot_mean() const { return mean(rot_err_deg); }
double TrialSnapshot::trans_mean() const { return mean(trans_err); }

namespace {

std::vector<RigidTransform> estimated_transforms(
    const PoseTwist& p0, const std::vector<PoseTwist>& dps) {
  std::vector<RigidTransform> out;
  out.reserve(dps.size() + 1);
  const RigidTransform base = transform_of(p0);
  out.push_back(base);
  for (const auto& dp : dps) out.push_back(compose(base, transform_of(dp)));
  return out;
}

}  // namespace

std::vector<double> per_frame_rotation_errors_deg(
    const SceneBundle& scene, const PoseTwist& p0,
    const std::vector<PoseTwist>& dps) {
  if (dps.size() + 1 != scene.frames.size()) {
    throw std::invalid_argument("per_frame errors: dps/frames mismatch");
  }
  const auto est = estimated_transforms(p0, dps);
  std::vector<double> out(scene.frames.size());
  for (std::size_t l = 0; l < scene.frames.size(); ++l) {
    out[l] = geodesic_rotation_error_deg(
        exp_so3(scene.frames[l].gt_pose.omega), est[l].rotation);
  }
  return out;
}

std::vector<double> per_frame_translation_errors(
    const SceneBundle& scene, const PoseTwist& p0,
    const std::vector<PoseTwist>& dps) {
  if (dps.size() + 1 != scene.frames.size()) {
    throw std::invalid_argument("per_frame errors: dps/frames mismatch");
  }
  const auto est = estimated_transforms(p0, dps);
  std::vector<double> out(scene.frames.size());
  for (std::size_t l = 0; l < scene.frames.size(); ++l) {
    out[l] = (scene.frames[l].gt_pose.trans - est[l].translation).norm();
  }
  return out;
}

SuccessCurve success_rate_curve(const std::vector<double>& errors,
                                const std::vector<double>& thresholds) {
  if (errors.empty()) {
    throw std::invalid_argument("success_rate_curve: empty error list");
  }
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (thresholds[i] < thresholds[i - 1]) {
      throw std::invalid_argument("success_rate_curve: thresholds not sorted");
    }
  }
  SuccessCurve curve;
  curve.thresholds = thresholds;
  curve.fraction.reserve(thresholds.size());
  for (double t : thresholds) {
    long n = 0;
    for (double e : errors) n += (e <= t);
    curve.fraction.push_back(static_cast<double>(n) / errors.size());
  }
  return curve;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median: empty");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2]
                    : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double mean(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean: empty");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / values.size();
}

namespace {

nlohmann::ordered_json snapshot_json(const TrialSnapshot& s) {
  return {{"rot_err_deg", s.rot_err_deg},
          {"trans_err", s.trans_err},
          {"style_err", s.style_err},
          {"loss",
           {{"l_ph", s.loss.l_ph},
            {"l_cd", s.loss.l_cd},
            {"l_total", s.loss.l_total},
            {"n_point_pairs", s.loss.n_point_pairs},
            {"n_dropped_oob", s.loss.n_dropped_oob},
            {"ph_per_pair", s.loss.ph_per_pair}}}};
}

TrialSnapshot snapshot_of_json(const nlohmann::json& j) {
  TrialSnapshot s;
  s.rot_err_deg = j.at("rot_err_deg").get<std::vector<double>>();
  s.trans_err = j.at("trans_err").get<std::vector<double>>();
  s.style_err = j.at("style_err").get<double>();
  const auto& loss = j.at("loss");
  s.loss.l_ph = loss.at("l_ph").get<double>();
  s.loss.l_cd = loss.at("l_cd").get<double>();
  s.loss.l_total = loss.at("l_total").get<double>();
  s.loss.n_point_pairs = loss.at("n_point_pairs").get<long>();
  s.loss.n_dropped_oob = loss.at("n_dropped_oob").get<long>();
  s.loss.ph_per_pair = loss.at("ph_per_pair").get<double>();
  return s;
}

}  // namespace

std::string trial_to_json(const TrialResult& trial) {
  nlohmann::ordered_json j;
  j["trial_id"] = trial.trial_id;
  j["seed"] = trial.seed;
  j["views"] = trial.views;
  j["loss_option"] = trial.loss_option;
  j["status"] = trial.status;
  j["rounds"] = trial.rounds;
  j["variables"] = trial.variables;
  j["empty_penalty_frames"] = trial.empty_penalty_frames;
  j["init"] = snapshot_json(trial.init);
  j["final"] = snapshot_json(trial.final_);
  return j.dump(2) + "\n";
}

TrialResult trial_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  TrialResult trial;
  trial.trial_id = j.at("trial_id").get<int>();
  trial.seed = j.at("seed").get<std::uint64_t>();
  trial.views = j.at("views").get<int>();
  trial.loss_option = j.at("loss_option").get<std::string>();
  trial.status = j.at("status").get<std::string>();
  trial.rounds = j.at("rounds").get<int>();
  trial.variables = j.at("variables").get<long>();
  trial.empty_penalty_frames = j.at("empty_penalty_frames").get<int>();
  trial.init = snapshot_of_json(j.at("init"));
  trial.final_ = snapshot_of_json(j.at("final"));
  return trial;
}

void write_trace_csv(const std::string& path,
                     const std::vector<LossTraceRow>& rows) {
  std::ostringstream out;
  out << "outer_iter,block,l_ph,l_cd,l_total,n_point_pairs,n_dropped_oob,"
         "grad_norm\n";
  for (const auto& r : rows) {
    out << r.outer_iter << ',' << r.block << ',' << format_double(r.l_ph)
        << ',' << format_double(r.l_cd) << ',' << format_double(r.l_total)
        << ',' << r.n_point_pairs << ',' << r.n_dropped_oob << ','
        << format_double(r.grad_norm) << '\n';
  }
  write_file_atomic(path, out.str());
}

void write_trials_csv(const std::string& path,
                      const std::vector<TrialResult>& trials) {
  std::ostringstream out;
  out << "trial_id,seed,views,loss_option,status,rounds,variables,"
         "empty_penalty_frames,"
         "init_rot_mean_deg,final_rot_mean_deg,"
         "init_trans_mean,final_trans_mean,"
         "init_style_err,final_style_err,"
         "init_l_ph,final_l_ph,init_l_cd,final_l_cd,"
         "init_l_total,final_l_total,final_n_point_pairs\n";
  for (const auto& t : trials) {
    out << t.trial_id << ',' << t.seed << ',' << t.views << ','
        << t.loss_option << ',' << t.status << ',' << t.rounds << ','
        << t.variables << ',' << t.empty_penalty_frames << ','
        << format_double(t.init.rot_mean()) << ','
        << format_double(t.final_.rot_mean()) << ','
        << format_double(t.init.trans_mean()) << ','
        << format_double(t.final_.trans_mean()) << ','
        << format_double(t.init.style_err) << ','
        << format_double(t.final_.style_err) << ','
        << format_double(t.init.loss.l_ph) << ','
        << format_double(t.final_.loss.l_ph) << ','
        << format_double(t.init.loss.l_cd) << ','
        << format_double(t.final_.loss.l_cd) << ','
        << format_double(t.init.loss.l_total) << ','
        << format_double(t.final_.loss.l_total) << ','
        << t.final_.loss.n_point_pairs << '\n';
  }
  write_file_atomic(path, out.str());
}

void write_curve_csv(const std::string& path, const SuccessCurve& curve) {
  std::ostringstream out;
  out << "threshold,success_rate\n";
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    out << format_double(curve.thresholds[i]) << ','
        << format_double(curve.fraction[i]) << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace spba
