#pragma once

#include <cstddef>
#include <filesystem>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdv/core/config.hpp"
#include "mdv/core/types.hpp"
#include "mdv/rd/range_doppler.hpp"
#include "mdv/sim/raw_io.hpp"
#include "mdv/sim/scene.hpp"
#include "mdv/track/detection.hpp"
#include "mdv/track/tracker.hpp"
#include "mdv/vitals/extraction.hpp"
#include "mdv/vitals/vitals.hpp"

namespace mdv::pipeline {

/// Produces raw frames ([rx][chirp][sample]) in order.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual const RadarConfig& config() const = 0;
  /// False when exhausted.
  virtual bool next(std::span<Complex> frame) = 0;
};

class SimulatedSource : public FrameSource {
 public:
  SimulatedSource(const sim::SceneSpec& scene, const RadarConfig& config);
  const RadarConfig& config() const override { return synth_.config(); }
  bool next(std::span<Complex> frame) override;

 private:
  sim::SceneSynthesizer synth_;
  std::size_t next_ = 0;
};

class RawFileSource : public FrameSource {
 public:
  RawFileSource(const std::filesystem::path& path, const RadarConfig& config);
  const RadarConfig& config() const override { return config_; }
  bool next(std::span<Complex> frame) override { return reader_.read_frame(frame); }
  const sim::RawReader& reader() const { return reader_; }

 private:
  RadarConfig config_;
  sim::RawReader reader_;
};

class CubeSource : public FrameSource {
 public:
  explicit CubeSource(const DataCube& cube) : cube_(validate_cube(cube)) {}
  const RadarConfig& config() const override { return cube_.config(); }
  bool next(std::span<Complex> frame) override;

 private:
  const DataCube& cube_;
  std::size_t next_ = 0;
};

enum class ExtractionMethod { energy, phase };
const char* to_string(ExtractionMethod m);
ExtractionMethod parse_extraction_method(const std::string& s);

struct PipelineConfig {
  track::DetectorConfig detector{};
  /// range_scale_m of 0 is replaced by the config's range bin spacing.
  track::TrackerParams tracker{5.0, 10, 20, 0.0, 0.5, 0.1};
  vitals::EnergyExtractionConfig energy{};
  vitals::VitalsConfig vitals{};
  /// Keep this frame's range profiles and range-Doppler map for dumping.
  std::optional<std::size_t> keep_frame;
};

/// Wall-clock seconds spent per stage, summed over frames.
struct StageTimings {
  double source_s = 0.0;
  double range_fft_s = 0.0;
  double doppler_fft_s = 0.0;
  double detection_s = 0.0;
  double tracking_s = 0.0;
  double extraction_s = 0.0;
  std::size_t frames = 0;

  /// Everything except the frame source.
  double processing_s() const { return range_fft_s + doppler_fft_s + detection_s + tracking_s + extraction_s; }
};

/// Slow-time series of one trajectory, from its first frame onwards.
struct TargetSeries {
  long long id = 0;
  std::size_t first_frame = 0;
  SlowTimeSeries energy;
  SlowTimeSeries phase;
};

struct PipelineResult {
  RadarConfig config;
  std::vector<track::Trajectory> trajectories;
  std::vector<TargetSeries> series;  // parallel to trajectories
  StageTimings timings;
  std::optional<rd::RangeProfileFrame> kept_profiles;
  std::optional<rd::RangeDopplerFrame> kept_map;
};

/// Streams every frame through range FFT, Doppler FFT, detection and
/// tracking. Energy and phase are read online at each live trajectory's
/// current cell (held while it is unmatched), so the cube is never stored.
PipelineResult run_pipeline(FrameSource& source, const PipelineConfig& config = {});

/// Vitals for one trajectory from the chosen series. Series shorter than a
/// Welch segment give a report with both bands invalid.
vitals::VitalsReport estimate_target(const PipelineResult& result, std::size_t index, ExtractionMethod method,
                                     const vitals::VitalsConfig& config = {});

/// Writes the scene as an int16 capture plus sidecar. The scene is
/// synthesised twice: once for the peak amplitude, once to write.
void simulate_to_raw(const sim::SceneSpec& scene, const RadarConfig& config, const std::filesystem::path& raw);

/// Inputs of one processing run. Exactly one of raw_path / scene_path.
struct RunManifest {
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> raw_path;
  std::optional<std::filesystem::path> scene_path;
  std::filesystem::path output_dir;
  /// Overrides the scene seed when simulating in memory.
  std::optional<std::uint64_t> seed;

  /// Throws ConfigError. Creates output_dir when missing and checks that a
  /// file can be created in it.
  void validate() const;
};

}  // namespace mdv::pipeline
