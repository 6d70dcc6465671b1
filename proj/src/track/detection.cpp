#include "mdv/track/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mdv/simd/kernels.hpp"

namespace mdv::track {

std::vector<double> power_map(const rd::RangeDopplerFrame& frame) {
  std::vector<double> p(frame.cells(), 0.0);
  const auto& k = simd::kernels();
  for (std::size_t r = 0; r < frame.rx; ++r) k.accumulate_norm(frame.data.data() + r * frame.cells(), p.data(), p.size());
  return p;
}

MagnitudeVarianceMap::MagnitudeVarianceMap(std::size_t rx, std::size_t doppler_bins, std::size_t range_bins,
                                           std::size_t window)
    : rx_(rx), doppler_(doppler_bins), range_(range_bins), window_(window) {
  if (window < 2) throw std::invalid_argument("variance window must be >= 2 frames");
  const std::size_t n = rx * doppler_bins * range_bins;
  slots_.assign(window * n, 0.0);
  sum_.assign(n, 0.0);
  sumsq_.assign(n, 0.0);
}

void MagnitudeVarianceMap::push(const rd::RangeDopplerFrame& frame) {
  const std::size_t n = sum_.size();
  if (frame.data.size() != n) throw DimensionError("variance map: frame has wrong size");
  const bool evict = count_ == window_;
  simd::kernels().update_moments(frame.data.data(), slots_.data() + head_ * n, sum_.data(), sumsq_.data(), n, evict);
  head_ = (head_ + 1) % window_;
  count_ = std::min(count_ + 1, window_);
  // Running add/remove drifts; rebuild from the stored window now and then.
  if (++pushes_ % 4096 == 0) refresh();
}

void MagnitudeVarianceMap::refresh() {
  const std::size_t n = sum_.size();
  std::fill(sum_.begin(), sum_.end(), 0.0);
  std::fill(sumsq_.begin(), sumsq_.end(), 0.0);
  for (std::size_t s = 0; s < count_; ++s) {
    const std::size_t slot = (head_ + window_ - count_ + s) % window_;
    const double* m = slots_.data() + slot * n;
    for (std::size_t i = 0; i < n; ++i) {
      sum_[i] += m[i];
      sumsq_[i] += m[i] * m[i];
    }
  }
}

std::vector<double> MagnitudeVarianceMap::variance() const {
  const std::size_t cells = doppler_ * range_;
  std::vector<double> v(cells, 0.0);
  if (count_ < 2) return v;
  const double inv = 1.0 / static_cast<double>(count_);
  for (std::size_t r = 0; r < rx_; ++r) {
    const double* s = sum_.data() + r * cells;
    const double* q = sumsq_.data() + r * cells;
    for (std::size_t i = 0; i < cells; ++i) {
      const double mean = s[i] * inv;
      v[i] += std::max(q[i] * inv - mean * mean, 0.0);
    }
  }
  return v;
}

std::vector<Detection> cluster_and_localize(std::span<const CfarCell> cells, const rd::RangeDopplerFrame& frame,
                                            std::size_t frame_index, double spacing,
                                            const spatial::MusicOptions& music) {
  const std::size_t rows = frame.doppler_bins, cols = frame.range_bins;
  std::vector<long long> index(rows * cols, -1);
  for (std::size_t i = 0; i < cells.size(); ++i) index[cells[i].doppler * cols + cells[i].range] = static_cast<long long>(i);

  std::vector<char> seen(cells.size(), 0);
  std::vector<Detection> out;
  std::vector<std::size_t> blob, stack;
  for (std::size_t start = 0; start < cells.size(); ++start) {
    if (seen[start]) continue;
    blob.clear();
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t c = stack.back();
      stack.pop_back();
      blob.push_back(c);
      for (int dd = -1; dd <= 1; ++dd) {
        for (int dk = -1; dk <= 1; ++dk) {
          const long long d = static_cast<long long>(cells[c].doppler) + dd;
          const long long k = static_cast<long long>(cells[c].range) + dk;
          if (d < 0 || k < 0 || d >= static_cast<long long>(rows) || k >= static_cast<long long>(cols)) continue;
          const long long j = index[static_cast<std::size_t>(d) * cols + static_cast<std::size_t>(k)];
          if (j >= 0 && !seen[static_cast<std::size_t>(j)]) {
            seen[static_cast<std::size_t>(j)] = 1;
            stack.push_back(static_cast<std::size_t>(j));
          }
        }
      }
    }

    double wsum = 0.0, wd = 0.0, wk = 0.0, best_snr = 0.0;
    std::vector<spatial::Cell> blob_cells;
    for (std::size_t c : blob) {
      double mag = 0.0;
      for (std::size_t r = 0; r < frame.rx; ++r) mag += std::abs(frame.at(r, cells[c].doppler, cells[c].range));
      wsum += mag;
      wd += mag * static_cast<double>(cells[c].doppler);
      wk += mag * static_cast<double>(cells[c].range);
      if (cells[c].noise > 0.0) best_snr = std::max(best_snr, cells[c].statistic / cells[c].noise);
      blob_cells.push_back({cells[c].doppler, cells[c].range});
    }
    Detection det;
    det.frame = frame_index;
    if (wsum > 0.0) {
      det.doppler_bin = static_cast<std::size_t>(std::lround(wd / wsum));
      det.range_bin = static_cast<std::size_t>(std::lround(wk / wsum));
    } else {
      det.doppler_bin = cells[blob.front()].doppler;
      det.range_bin = cells[blob.front()].range;
    }
    det.range_m = static_cast<double>(det.range_bin) * spacing;
    det.snr_db = best_snr > 0.0 ? 10.0 * std::log10(best_snr) : 0.0;
    if (frame.rx >= 2) {
      const auto cov = spatial::estimate_covariance(frame, blob_cells);
      const auto spectrum = spatial::music_spectrum(cov, 1, music);
      const auto peaks = spatial::music_peaks(spectrum, 1);
      if (!peaks.empty()) det.angle_deg = peaks.front();
    }
    out.push_back(det);
  }
  std::sort(out.begin(), out.end(), [](const Detection& a, const Detection& b) {
    return a.range_bin != b.range_bin ? a.range_bin < b.range_bin : a.doppler_bin < b.doppler_bin;
  });
  return out;
}

const char* to_string(DetectionMode mode) {
  switch (mode) {
    case DetectionMode::doppler: return "doppler";
    case DetectionMode::variance: return "variance";
    case DetectionMode::automatic: return "auto";
  }
  return "unknown";
}

DetectionMode parse_detection_mode(const std::string& s) {
  if (s == "doppler") return DetectionMode::doppler;
  if (s == "variance") return DetectionMode::variance;
  if (s == "auto") return DetectionMode::automatic;
  throw std::invalid_argument("unknown detection mode '" + s + "' (expected doppler, variance or auto)");
}

FrameDetector::FrameDetector(const DetectorConfig& config, const RadarConfig& radar)
    : config_(config),
      range_bin_spacing_m_(derive_quantities(radar).range_bin_spacing_m),
      variance_(radar.num_rx, radar.chirps_per_frame, radar.range_fft_size, config.variance_window) {
  config_.doppler_cfar.validate();
  config_.variance_cfar.validate();
  config_.music.spacing_wavelengths = radar.antenna_spacing_wavelengths;
}

std::vector<Detection> FrameDetector::process(std::size_t frame_index, const rd::RangeDopplerFrame& frame) {
  const std::size_t rows = frame.doppler_bins, cols = frame.range_bins;
  if (config_.mode != DetectionMode::doppler) variance_.push(frame);

  if (config_.mode != DetectionMode::variance) {
    const auto cells = cfar_2d(power_map(frame), rows, cols, config_.doppler_cfar);
    if (!cells.empty() || config_.mode == DetectionMode::doppler) {
      return cluster_and_localize(cells, frame, frame_index, range_bin_spacing_m_, config_.music);
    }
  }
  if (variance_.count() < config_.variance_min_frames) return {};
  const auto cells = cfar_2d(variance_.variance(), rows, cols, config_.variance_cfar);
  return cluster_and_localize(cells, frame, frame_index, range_bin_spacing_m_, config_.music);
}

}  // namespace mdv::track
