#pragma once

#include <algorithm>
#include <filesystem>
#include <span>
#include <vector>

#include "mdv/core/config.hpp"
#include "mdv/core/types.hpp"

namespace mdv::rd {

/// Range profiles of one frame, [rx][chirp][range_bin].
struct RangeProfileFrame {
  std::size_t rx = 0, chirps = 0, range_bins = 0;
  std::vector<Complex> data;

  Complex& at(std::size_t r, std::size_t c, std::size_t k) { return data[(r * chirps + c) * range_bins + k]; }
  const Complex& at(std::size_t r, std::size_t c, std::size_t k) const {
    return data[(r * chirps + c) * range_bins + k];
  }
};

/// Range-Doppler map of one frame, [rx][doppler_bin][range_bin], Doppler
/// shifted so zero Doppler sits at row doppler_bins / 2.
struct RangeDopplerFrame {
  std::size_t rx = 0, doppler_bins = 0, range_bins = 0;
  std::vector<Complex> data;

  std::size_t zero_doppler() const { return doppler_bins / 2; }
  Complex& at(std::size_t r, std::size_t d, std::size_t k) {
    return data[(r * doppler_bins + d) * range_bins + k];
  }
  const Complex& at(std::size_t r, std::size_t d, std::size_t k) const {
    return data[(r * doppler_bins + d) * range_bins + k];
  }
  std::size_t cells() const { return doppler_bins * range_bins; }
};

struct RangeProfileStack {
  std::vector<RangeProfileFrame> frames;
};

struct RangeDopplerStack {
  std::vector<RangeDopplerFrame> frames;
  double slow_time_rate_hz = 0.0;
};

/// Per-frame transforms with windows and FFT plans built once.
class RangeDopplerProcessor {
 public:
  explicit RangeDopplerProcessor(const RadarConfig& config);

  /// Hanning window over samples, zero-pad to range_fft_size, FFT.
  /// frame is [rx][chirp][sample].
  void range_fft(std::span<const Complex> frame, RangeProfileFrame& out) const;

  /// Hanning window over chirps, FFT per range bin, fftshift.
  void doppler_fft(const RangeProfileFrame& profiles, RangeDopplerFrame& out) const;

  /// Both stages; `scratch` holds the range profiles.
  void process(std::span<const Complex> frame, RangeProfileFrame& scratch, RangeDopplerFrame& out) const;
  RangeDopplerFrame process(std::span<const Complex> frame) const;

  const RadarConfig& config() const { return config_; }

 private:
  RadarConfig config_;
  std::vector<double> range_window_;
  std::vector<double> doppler_window_;
};

RangeProfileStack range_fft(const DataCube& cube);
RangeDopplerStack doppler_fft(const RangeProfileStack& profiles, const RadarConfig& config);
RangeDopplerStack range_doppler(const DataCube& cube);

/// Circular shift by n/2 (zero frequency to the middle).
template <typename T>
void fftshift(std::span<T> x) {
  std::rotate(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(x.size() - x.size() / 2), x.end());
}

/// CSV of sum over antennas of |S|^2, one row per Doppler bin (top row is
/// the most negative Doppler), one column per range bin.
void write_magnitude_csv(const RangeDopplerFrame& frame, const std::filesystem::path& path);

/// CSV "range_bin,range_m,power" of chirp 0 summed over antennas.
void write_range_profile_csv(const RangeProfileFrame& profiles, double range_bin_spacing_m,
                             const std::filesystem::path& path);

}  // namespace mdv::rd
