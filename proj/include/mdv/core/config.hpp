#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace mdv {

inline constexpr double kSpeedOfLight = 299'792'458.0;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public DataError {
 public:
  using DataError::DataError;
};

/// Radar front-end and processing constants. Defaults reproduce the 77 GHz,
/// 4 GHz, 4-RX system this toolkit was built around.
struct RadarConfig {
  double center_frequency_hz = 77.0e9;
  double bandwidth_hz = 4.0e9;
  double chirp_duration_s = 40.0e-6;
  double sample_rate_sps = 3.6e6;
  std::size_t num_frames = 6000;
  std::size_t num_rx = 4;
  std::size_t chirps_per_frame = 64;
  std::size_t samples_per_chirp = 128;
  double frame_time_s = 10.0e-3;
  std::size_t range_fft_size = 256;
  double antenna_spacing_wavelengths = 0.5;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  bool operator==(const RadarConfig&) const = default;
};

struct DerivedQuantities {
  double wavelength_m;
  double chirp_rate_hz_per_s;
  double range_resolution_m;
  double range_bin_spacing_m;
  double doppler_bin_spacing_hz;
  double slow_time_rate_hz;
  /// Largest range whose beat frequency stays below the complex sample rate.
  double max_unambiguous_range_m;
};

DerivedQuantities derive_quantities(const RadarConfig& config);

RadarConfig load_config(const std::filesystem::path& path);
RadarConfig parse_config(const std::string& text);
std::string config_to_json(const RadarConfig& config);

/// FNV-1a over the canonical JSON form; stored in raw-file sidecars.
std::uint64_t config_hash(const RadarConfig& config);

}  // namespace mdv
