#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mdv/rd/range_doppler.hpp"
#include "mdv/spatial/music.hpp"
#include "mdv/track/cfar.hpp"

namespace mdv::track {

struct Detection {
  std::size_t frame = 0;
  std::size_t range_bin = 0;
  std::size_t doppler_bin = 0;
  /// range_bin * range bin spacing.
  double range_m = 0.0;
  double angle_deg = 0.0;
  /// Peak statistic over the local CFAR noise estimate.
  double snr_db = 0.0;
};

/// Sum over antennas of |S|^2, [doppler][range].
std::vector<double> power_map(const rd::RangeDopplerFrame& frame);

/// Per-cell variance of |S| over a trailing window of frames, summed over
/// antennas. Static returns are constant in magnitude and drop out, while
/// breathing subjects modulate their cell's magnitude.
class MagnitudeVarianceMap {
 public:
  MagnitudeVarianceMap(std::size_t rx, std::size_t doppler_bins, std::size_t range_bins, std::size_t window);

  void push(const rd::RangeDopplerFrame& frame);
  /// Frames currently in the window.
  std::size_t count() const { return count_; }
  std::size_t window() const { return window_; }
  /// [doppler][range]; zeros before the first frame.
  std::vector<double> variance() const;

 private:
  void refresh();

  std::size_t rx_, doppler_, range_, window_;
  std::size_t count_ = 0, head_ = 0, pushes_ = 0;
  std::vector<double> slots_;  // [window][rx * doppler * range]
  std::vector<double> sum_, sumsq_;
};

/// Merges 8-connected CFAR cells into blobs and emits one Detection per blob
/// at its magnitude-weighted centroid cell. The angle comes from MUSIC (one
/// source) on the covariance of the blob's cells.
std::vector<Detection> cluster_and_localize(std::span<const CfarCell> cells, const rd::RangeDopplerFrame& frame,
                                            std::size_t frame_index, double range_bin_spacing_m,
                                            const spatial::MusicOptions& music = {});

enum class DetectionMode {
  /// CFAR on the range-Doppler power map.
  doppler,
  /// CFAR on the slow-time magnitude variance map.
  variance,
  /// Power map first, variance map when it yields nothing.
  automatic,
};

const char* to_string(DetectionMode mode);
DetectionMode parse_detection_mode(const std::string& s);

struct DetectorConfig {
  DetectionMode mode = DetectionMode::variance;
  CfarConfig doppler_cfar{};
  /// The variance map has no static ridge to suppress.
  CfarConfig variance_cfar{2, 2, 4, 4, 1e-4, 0};
  std::size_t variance_window = 64;
  /// Variance detections start once this many frames are in the window.
  std::size_t variance_min_frames = 16;
  spatial::MusicOptions music{};
};

/// Stateful per-frame detector (keeps the variance window).
class FrameDetector {
 public:
  FrameDetector(const DetectorConfig& config, const RadarConfig& radar);

  std::vector<Detection> process(std::size_t frame_index, const rd::RangeDopplerFrame& frame);

 private:
  DetectorConfig config_;
  double range_bin_spacing_m_;
  MagnitudeVarianceMap variance_;
};

}  // namespace mdv::track
