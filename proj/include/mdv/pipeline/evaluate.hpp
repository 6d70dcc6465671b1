#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mdv/core/config.hpp"
#include "mdv/sim/scene.hpp"

namespace mdv::pipeline {

struct TruthTarget {
  double range_m = 0.0;
  double angle_deg = 0.0;
  double respiration_bpm = 0.0;
  double heart_bpm = 0.0;
};

std::vector<TruthTarget> truth_from_scene(const sim::SceneSpec& scene);
/// Ground-truth file written next to a simulated capture.
std::string truth_to_json(const sim::SceneSpec& scene, const RadarConfig& config);
/// Throws DataError on malformed input.
std::vector<TruthTarget> parse_truth(const std::string& text);

/// The fields of a per-target report that evaluation needs.
struct ReportSummary {
  long long trajectory_id = -1;
  std::string source = "energy";
  double range_m = 0.0;
  double angle_deg = 0.0;
  std::optional<double> respiration_bpm;
  std::optional<double> heart_bpm;
};

ReportSummary parse_report(const std::string& text);

struct RateMetrics {
  double mae_bpm = 0.0;
  double rmse_bpm = 0.0;
  /// Matched targets with a valid estimate.
  std::size_t count = 0;
};

struct TargetMatch {
  std::size_t truth_index = 0;
  long long trajectory_id = -1;
  double range_error_m = 0.0;
  double angle_error_deg = 0.0;
  std::optional<double> respiration_error_bpm;
  std::optional<double> heart_error_bpm;
};

struct MethodMetrics {
  std::size_t matched = 0;
  /// Matched truth targets over all truth targets.
  double detection_rate = 0.0;
  /// Reports left without a truth target.
  std::size_t false_tracks = 0;
  double range_mae_m = 0.0;
  double angle_mae_deg = 0.0;
  RateMetrics respiration;
  RateMetrics heart;
  std::vector<TargetMatch> targets;
};

struct Metrics {
  std::size_t num_truth = 0;
  /// Keyed by report source ("energy", "phase").
  std::map<std::string, MethodMetrics> methods;
};

struct EvaluateOptions {
  /// Association cost is hypot(dr / range_scale_m, da / angle_scale_deg);
  /// pairs at or above the gate are not matched.
  double range_scale_m = 0.1;
  double angle_scale_deg = 5.0;
  double gate = 3.0;
};

/// Associates reports (per source) with truth targets by minimum-cost
/// assignment over position and computes MAE / RMSE.
Metrics evaluate(const std::vector<ReportSummary>& reports, const std::vector<TruthTarget>& truth,
                 const EvaluateOptions& options = {});

std::string metrics_to_json(const Metrics& metrics);

}  // namespace mdv::pipeline
