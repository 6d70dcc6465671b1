#include "mdv/pipeline/evaluate.hpp"

#include <cmath>

#include <json.hpp>

#include "mdv/track/hungarian.hpp"

namespace mdv::pipeline {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

RateMetrics rate_metrics(const std::vector<double>& errors) {
  RateMetrics m;
  m.count = errors.size();
  if (errors.empty()) return m;
  double a = 0.0, s = 0.0;
  for (double e : errors) {
    a += std::fabs(e);
    s += e * e;
  }
  m.mae_bpm = a / static_cast<double>(errors.size());
  m.rmse_bpm = std::sqrt(s / static_cast<double>(errors.size()));
  return m;
}

ordered_json rate_json(const RateMetrics& m) {
  ordered_json j;
  j["mae_bpm"] = m.count ? ordered_json(m.mae_bpm) : ordered_json(nullptr);
  j["rmse_bpm"] = m.count ? ordered_json(m.rmse_bpm) : ordered_json(nullptr);
  j["count"] = m.count;
  return j;
}

}  // namespace

std::vector<TruthTarget> truth_from_scene(const sim::SceneSpec& scene) {
  std::vector<TruthTarget> out;
  for (const auto& s : scene.subjects) {
    out.push_back({s.range_m, s.angle_deg, 60.0 * s.respiration_hz, 60.0 * s.heart_hz});
  }
  return out;
}

std::string truth_to_json(const sim::SceneSpec& scene, const RadarConfig& config) {
  ordered_json j;
  j["seed"] = scene.seed;
  j["frames"] = config.num_frames;
  j["duration_s"] = static_cast<double>(config.num_frames) * config.frame_time_s;
  j["noise_stddev"] = scene.noise_stddev;
  j["subjects"] = ordered_json::array();
  for (const auto& s : scene.subjects) {
    ordered_json sj;
    sj["range_m"] = s.range_m;
    sj["angle_deg"] = s.angle_deg;
    sj["respiration_hz"] = s.respiration_hz;
    sj["heart_hz"] = s.heart_hz;
    sj["respiration_bpm"] = 60.0 * s.respiration_hz;
    sj["heart_bpm"] = 60.0 * s.heart_hz;
    // Per-sample SNR; null for a noiseless scene.
    sj["snr_db"] = scene.noise_stddev > 0.0
                       ? ordered_json(20.0 * std::log10(sim::subject_amplitude(s, scene) / scene.noise_stddev))
                       : ordered_json(nullptr);
    j["subjects"].push_back(sj);
  }
  return j.dump(2);
}

std::vector<TruthTarget> parse_truth(const std::string& text) {
  try {
    const json j = json::parse(text);
    std::vector<TruthTarget> out;
    for (const auto& s : j.at("subjects")) {
      out.push_back({s.at("range_m").get<double>(), s.at("angle_deg").get<double>(),
                     s.at("respiration_bpm").get<double>(), s.at("heart_bpm").get<double>()});
    }
    return out;
  } catch (const json::exception& e) {
    throw DataError(std::string("truth file: ") + e.what());
  }
}

ReportSummary parse_report(const std::string& text) {
  try {
    const json j = json::parse(text);
    ReportSummary r;
    r.trajectory_id = j.at("trajectory_id").get<long long>();
    r.source = j.at("source").get<std::string>();
    r.range_m = j.at("range_m").get<double>();
    r.angle_deg = j.at("angle_deg").get<double>();
    if (!j.at("respiration_bpm").is_null()) r.respiration_bpm = j.at("respiration_bpm").get<double>();
    if (!j.at("heart_bpm").is_null()) r.heart_bpm = j.at("heart_bpm").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("report file: ") + e.what());
  }
}

Metrics evaluate(const std::vector<ReportSummary>& reports, const std::vector<TruthTarget>& truth,
                 const EvaluateOptions& opt) {
  Metrics m;
  m.num_truth = truth.size();
  std::map<std::string, std::vector<const ReportSummary*>> by_source;
  for (const auto& r : reports) by_source[r.source].push_back(&r);

  for (const auto& [source, rs] : by_source) {
    MethodMetrics mm;
    const double sentinel = opt.gate * 1e6;
    std::vector<double> cost(truth.size() * rs.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
      for (std::size_t j = 0; j < rs.size(); ++j) {
        const double c = std::hypot((rs[j]->range_m - truth[i].range_m) / opt.range_scale_m,
                                    (rs[j]->angle_deg - truth[i].angle_deg) / opt.angle_scale_deg);
        cost[i * rs.size() + j] = c < opt.gate ? c : sentinel;
      }
    }
    const auto a = track::hungarian(cost, truth.size(), rs.size());
    std::vector<double> rr, hr;
    double range_sum = 0.0, angle_sum = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const long long j = a.row_to_col[i];
      if (j < 0 || cost[i * rs.size() + static_cast<std::size_t>(j)] >= opt.gate) continue;
      const ReportSummary& r = *rs[static_cast<std::size_t>(j)];
      TargetMatch t;
      t.truth_index = i;
      t.trajectory_id = r.trajectory_id;
      t.range_error_m = r.range_m - truth[i].range_m;
      t.angle_error_deg = r.angle_deg - truth[i].angle_deg;
      if (r.respiration_bpm) {
        t.respiration_error_bpm = *r.respiration_bpm - truth[i].respiration_bpm;
        rr.push_back(*t.respiration_error_bpm);
      }
      if (r.heart_bpm) {
        t.heart_error_bpm = *r.heart_bpm - truth[i].heart_bpm;
        hr.push_back(*t.heart_error_bpm);
      }
      range_sum += std::fabs(t.range_error_m);
      angle_sum += std::fabs(t.angle_error_deg);
      mm.targets.push_back(t);
    }
    mm.matched = mm.targets.size();
    mm.false_tracks = rs.size() - mm.matched;
    mm.detection_rate = truth.empty() ? 1.0 : static_cast<double>(mm.matched) / static_cast<double>(truth.size());
    if (mm.matched) {
      mm.range_mae_m = range_sum / static_cast<double>(mm.matched);
      mm.angle_mae_deg = angle_sum / static_cast<double>(mm.matched);
    }
    mm.respiration = rate_metrics(rr);
    mm.heart = rate_metrics(hr);
    m.methods[source] = std::move(mm);
  }
  return m;
}

std::string metrics_to_json(const Metrics& m) {
  ordered_json j;
  j["num_truth"] = m.num_truth;
  j["methods"] = ordered_json::object();
  for (const auto& [source, mm] : m.methods) {
    ordered_json k;
    k["detection_rate"] = mm.detection_rate;
    k["matched"] = mm.matched;
    k["false_tracks"] = mm.false_tracks;
    k["range_mae_m"] = mm.matched ? ordered_json(mm.range_mae_m) : ordered_json(nullptr);
    k["angle_mae_deg"] = mm.matched ? ordered_json(mm.angle_mae_deg) : ordered_json(nullptr);
    k["respiration"] = rate_json(mm.respiration);
    k["heart"] = rate_json(mm.heart);
    k["per_target"] = ordered_json::array();
    for (const auto& t : mm.targets) {
      ordered_json tj;
      tj["truth_index"] = t.truth_index;
      tj["trajectory_id"] = t.trajectory_id;
      tj["range_error_m"] = t.range_error_m;
      tj["angle_error_deg"] = t.angle_error_deg;
      tj["respiration_abs_error_bpm"] = optional_number(t.respiration_error_bpm ? std::optional(std::fabs(*t.respiration_error_bpm)) : std::nullopt);
      tj["heart_abs_error_bpm"] = optional_number(t.heart_error_bpm ? std::optional(std::fabs(*t.heart_error_bpm)) : std::nullopt);
      k["per_target"].push_back(tj);
    }
    j["methods"][source] = k;
  }
  return j.dump(2);
}

}  // namespace mdv::pipeline
