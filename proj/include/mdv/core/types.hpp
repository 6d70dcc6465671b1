#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "mdv/core/config.hpp"

namespace mdv {

/// One I/Q sample: real part is I, imaginary part is Q.
using Complex = std::complex<double>;

/// Raw samples of the whole capture, laid out [frame][rx][chirp][sample].
class DataCube {
 public:
  explicit DataCube(RadarConfig config);
  /// Explicit dimensions; they may disagree with the config (validate_cube
  /// reports that).
  DataCube(RadarConfig config, std::size_t frames, std::size_t rx, std::size_t chirps,
           std::size_t samples);

  const RadarConfig& config() const { return config_; }
  std::size_t frames() const { return frames_; }
  std::size_t rx() const { return rx_; }
  std::size_t chirps() const { return chirps_; }
  std::size_t samples() const { return samples_; }
  std::size_t frame_size() const { return rx_ * chirps_ * samples_; }

  Complex& at(std::size_t f, std::size_t r, std::size_t c, std::size_t s) {
    return data_[((f * rx_ + r) * chirps_ + c) * samples_ + s];
  }
  const Complex& at(std::size_t f, std::size_t r, std::size_t c, std::size_t s) const {
    return data_[((f * rx_ + r) * chirps_ + c) * samples_ + s];
  }

  std::span<Complex> frame(std::size_t f) { return {data_.data() + f * frame_size(), frame_size()}; }
  std::span<const Complex> frame(std::size_t f) const {
    return {data_.data() + f * frame_size(), frame_size()};
  }

  std::span<Complex> data() { return data_; }
  std::span<const Complex> data() const { return data_; }

 private:
  RadarConfig config_;
  std::size_t frames_, rx_, chirps_, samples_;
  std::vector<Complex> data_;
};

/// Checks dimensions against the config and that every sample is finite.
/// Throws DimensionError / DataError.
const DataCube& validate_cube(const DataCube& cube);

/// A real-valued signal sampled along slow time (one value per frame).
struct SlowTimeSeries {
  std::vector<double> values;
  double sample_rate_hz = 0.0;

  std::size_t size() const { return values.size(); }
  double duration_s() const { return sample_rate_hz > 0.0 ? values.size() / sample_rate_hz : 0.0; }
};

}  // namespace mdv
