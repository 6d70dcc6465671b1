#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "mdv/track/detection.hpp"

namespace mdv::track {

struct TrackState {
  double range_m = 0.0;
  double angle_deg = 0.0;
  /// Per frame.
  double range_rate = 0.0;
  double angle_rate = 0.0;
};

struct Trajectory {
  long long id = 0;
  std::vector<Detection> points;
  TrackState state;
  std::size_t missed_count = 0;
  /// Cleared once missed_count exceeds the limit; no further association.
  bool active = true;

  std::size_t first_frame() const { return points.front().frame; }
  std::size_t last_frame() const { return points.back().frame; }
};

struct TrackerParams {
  /// Association gate in normalised units.
  double gate_distance = 5.0;
  /// Trajectories with fewer points are dropped at the end.
  std::size_t min_length = 10;
  /// A trajectory unmatched for more than this many consecutive frames ends.
  std::size_t max_missed = 20;
  /// Normalisation of the range and angle differences in the cost.
  double range_scale_m = 0.0210795;
  double angle_scale_deg = 0.5;
  /// Weight of the newest frame-to-frame displacement in the rate estimate.
  double rate_gain = 0.1;
};

/// Constant-velocity prediction and Hungarian association, one frame at a
/// time.
class Tracker {
 public:
  explicit Tracker(TrackerParams params);

  /// Returns, for each detection, the id of the trajectory it joined or
  /// started; -1 for a leftover measurement inside a live track's gate
  /// (tracks started earlier in the same frame count, strongest leftovers
  /// start first), which is dropped instead of starting a trajectory.
  std::vector<long long> step(std::size_t frame, std::span<const Detection> detections);

  const std::vector<Trajectory>& trajectories() const { return tracks_; }
  const TrackerParams& params() const { return params_; }

  /// All trajectories with at least min_length points.
  std::vector<Trajectory> finish() const;

  /// Normalised distance between a predicted state and a detection.
  double cost(const TrackState& predicted, const Detection& d) const;
  static TrackState predict(const Trajectory& t, std::size_t frame);

 private:
  TrackerParams params_;
  std::vector<Trajectory> tracks_;
  long long next_id_ = 0;
};

/// Runs a Tracker over per-frame detection lists (index = frame).
std::vector<Trajectory> track(const std::vector<std::vector<Detection>>& frames, const TrackerParams& params);

/// CSV "frame,id,range_m,angle_deg,snr_db", ordered by frame then id.
void write_trajectories_csv(std::span<const Trajectory> trajectories, const std::filesystem::path& path);

}  // namespace mdv::track
