#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdv/core/config.hpp"
#include "mdv/core/types.hpp"

namespace mdv::sim {

/// One breathing subject. Chest range follows
///   R(t) = R0 + d_r sin(2 pi f_r t + phi_r) + d_h sin(2 pi f_h t + phi_h)
/// and the reflectivity |Gamma(t)|^2 = G0 + Gr cos(2 pi f_r t + phi_r)
/// + Gh cos(2 pi f_h t + phi_h).
struct SubjectSpec {
  double range_m = 2.0;
  double angle_deg = 0.0;
  double respiration_hz = 0.25;
  double heart_hz = 1.2;
  double resp_displacement_m = 4.0e-3;
  double heart_displacement_m = 0.3e-3;
  double rcs_static = 1.0;
  double rcs_resp_mod = 0.2;
  double rcs_heart_mod = 0.05;
  double resp_phase_rad = 0.0;
  double heart_phase_rad = 0.0;
};

/// Common-mode body sway added to every subject's range.
struct MotionArtifact {
  double amplitude_m = 0.0;
  double frequency_hz = 0.0;
};

struct SceneSpec {
  std::vector<SubjectSpec> subjects;
  /// Per-sample complex noise, E|n|^2 = noise_stddev^2.
  double noise_stddev = 0.0;
  std::optional<MotionArtifact> motion_artifact;
  /// Std-dev of an i.i.d. per-frame, per-subject Gaussian carrier phase error.
  double phase_jitter_rad = 0.0;
  /// Amplitude of a unit-RCS subject at 1 m.
  double amplitude_scale = 1.0;
  std::uint64_t seed = 0;
  /// Skip the physiological rate checks (stress tests).
  bool allow_nonphysiological = false;
};

/// Throws ConfigError describing the first problem.
void validate_scene(const SceneSpec& scene, const RadarConfig& config);

SceneSpec parse_scene(const std::string& text);
SceneSpec load_scene(const std::filesystem::path& path);
std::string scene_to_json(const SceneSpec& scene);

/// Static beat amplitude of a subject at its rest range.
double subject_amplitude(const SubjectSpec& subject, const SceneSpec& scene);

/// Noise std-dev giving per-sample SNR = amplitude^2 / sigma^2 of snr_db.
double noise_stddev_for_snr(double amplitude, double snr_db);

/// Chest range of a subject at slow time t, including the motion artifact.
double subject_range(const SubjectSpec& subject, const SceneSpec& scene, double t);

/// Frame-by-frame synthesiser. Frames are independent: frame f depends only
/// on (scene, config, f), so they can be produced in any order.
class SceneSynthesizer {
 public:
  SceneSynthesizer(SceneSpec scene, RadarConfig config);

  const SceneSpec& scene() const { return scene_; }
  const RadarConfig& config() const { return config_; }
  std::size_t frame_size() const;

  /// Writes frame f laid out [rx][chirp][sample].
  void synthesize_frame(std::size_t frame, std::span<Complex> out) const;

 private:
  SceneSpec scene_;
  RadarConfig config_;
  DerivedQuantities derived_;
};

/// Whole cube of config.num_frames frames.
DataCube simulate(const SceneSpec& scene, const RadarConfig& config);

}  // namespace mdv::sim
