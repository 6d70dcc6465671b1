#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>

#include "mdv/core/config.hpp"
#include "mdv/core/types.hpp"

namespace mdv::sim {

/// Contents of the "<raw>.hdr" text sidecar.
struct RawHeader {
  std::size_t frames = 0;
  std::size_t rx = 0;
  std::size_t chirps = 0;
  std::size_t samples = 0;
  /// Stored count = round(value * scale).
  double scale = 1.0;
  std::uint64_t config_hash = 0;
};

std::filesystem::path sidecar_path(const std::filesystem::path& raw);
void write_sidecar(const std::filesystem::path& raw, const RawHeader& header);
RawHeader read_sidecar(const std::filesystem::path& raw);

/// Bytes of a capture: frames * rx * chirps * samples * 2 (I, Q) * 2.
std::uint64_t raw_byte_length(const RadarConfig& config);

/// Scale mapping max_abs to 90% of int16 full scale; 1 when max_abs is 0.
double raw_scale_for(double max_abs);

/// Largest |I| or |Q| over the samples.
double max_abs_component(std::span<const Complex> samples);

/// Streams frames to a little-endian int16 file, [rx][chirp][sample][I, Q]
/// per frame. The sidecar is written by close().
class RawWriter {
 public:
  RawWriter(const std::filesystem::path& path, const RadarConfig& config, double scale);
  ~RawWriter();
  RawWriter(const RawWriter&) = delete;
  RawWriter& operator=(const RawWriter&) = delete;

  /// Throws DataError when a scaled component does not fit in int16.
  void write_frame(std::span<const Complex> frame);
  void close();

 private:
  std::filesystem::path path_;
  RadarConfig config_;
  double scale_;
  std::size_t frames_written_ = 0;
  std::ofstream out_;
  std::vector<std::int16_t> buffer_;
  bool closed_ = false;
};

/// Sequential frame reader. Validates file size and sidecar dimensions
/// against the config on open.
class RawReader {
 public:
  RawReader(const std::filesystem::path& path, const RadarConfig& config);

  const RawHeader& header() const { return header_; }
  /// False when the sidecar's config hash differs from this config's.
  bool config_hash_matches() const { return hash_matches_; }
  std::size_t frames() const { return config_.num_frames; }

  /// Reads the next frame; returns false at end of file.
  bool read_frame(std::span<Complex> out);

 private:
  RadarConfig config_;
  RawHeader header_;
  bool hash_matches_ = true;
  std::ifstream in_;
  std::size_t next_frame_ = 0;
  std::vector<std::int16_t> buffer_;
};

/// Whole-cube convenience wrappers. write_raw scales to the cube's max.
void write_raw(const DataCube& cube, const std::filesystem::path& path);
DataCube read_raw(const std::filesystem::path& path, const RadarConfig& config);

}  // namespace mdv::sim
