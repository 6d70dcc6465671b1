#include "mdv/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace mdv::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Accumulator {
  std::size_t first_frame = 0;
  std::vector<double> energy;
  std::vector<double> phase;
  vitals::PhaseUnwrapper unwrap;
};

}  // namespace

SimulatedSource::SimulatedSource(const sim::SceneSpec& scene, const RadarConfig& config) : synth_(scene, config) {}

bool SimulatedSource::next(std::span<Complex> frame) {
  if (next_ >= synth_.config().num_frames) return false;
  synth_.synthesize_frame(next_++, frame);
  return true;
}

RawFileSource::RawFileSource(const std::filesystem::path& path, const RadarConfig& config)
    : config_(config), reader_(path, config) {}

bool CubeSource::next(std::span<Complex> frame) {
  if (next_ >= cube_.frames()) return false;
  const auto src = cube_.frame(next_++);
  std::copy(src.begin(), src.end(), frame.begin());
  return true;
}

const char* to_string(ExtractionMethod m) { return m == ExtractionMethod::energy ? "energy" : "phase"; }

ExtractionMethod parse_extraction_method(const std::string& s) {
  if (s == "energy") return ExtractionMethod::energy;
  if (s == "phase") return ExtractionMethod::phase;
  throw std::invalid_argument("unknown method '" + s + "' (expected energy or phase)");
}

PipelineResult run_pipeline(FrameSource& source, const PipelineConfig& cfg) {
  const RadarConfig& config = source.config();
  const DerivedQuantities q = derive_quantities(config);
  track::TrackerParams tp = cfg.tracker;
  if (tp.range_scale_m <= 0.0) tp.range_scale_m = q.range_bin_spacing_m;

  const rd::RangeDopplerProcessor proc(config);
  track::FrameDetector detector(cfg.detector, config);
  track::Tracker tracker(tp);
  std::unordered_map<long long, Accumulator> acc;

  PipelineResult result;
  result.config = config;
  std::vector<Complex> raw(config.num_rx * config.chirps_per_frame * config.samples_per_chirp);
  rd::RangeProfileFrame profiles;
  rd::RangeDopplerFrame map;
  StageTimings& t = result.timings;

  for (std::size_t frame = 0;; ++frame) {
    auto t0 = Clock::now();
    if (!source.next(raw)) break;
    t.source_s += since(t0);

    t0 = Clock::now();
    proc.range_fft(raw, profiles);
    t.range_fft_s += since(t0);
    t0 = Clock::now();
    proc.doppler_fft(profiles, map);
    t.doppler_fft_s += since(t0);
    if (cfg.keep_frame && *cfg.keep_frame == frame) {
      result.kept_profiles = profiles;
      result.kept_map = map;
    }

    t0 = Clock::now();
    const auto dets = detector.process(frame, map);
    t.detection_s += since(t0);

    t0 = Clock::now();
    tracker.step(frame, dets);
    t.tracking_s += since(t0);

    t0 = Clock::now();
    for (const track::Trajectory& traj : tracker.trajectories()) {
      if (!traj.active) continue;
      auto [it, fresh] = acc.try_emplace(traj.id);
      if (fresh) it->second.first_frame = frame;
      const track::Detection& p = traj.points.back();
      it->second.energy.push_back(vitals::window_energy(map, p.doppler_bin, p.range_bin, cfg.energy));
      it->second.phase.push_back(it->second.unwrap.push(map.at(0, p.doppler_bin, p.range_bin)));
    }
    t.extraction_s += since(t0);
    ++t.frames;
  }

  const double fs = q.slow_time_rate_hz;
  for (track::Trajectory& traj : tracker.finish()) {
    Accumulator& a = acc.at(traj.id);
    result.series.push_back({traj.id, a.first_frame, {std::move(a.energy), fs}, {std::move(a.phase), fs}});
    result.trajectories.push_back(std::move(traj));
  }
  return result;
}

vitals::VitalsReport estimate_target(const PipelineResult& result, std::size_t index, ExtractionMethod method,
                                     const vitals::VitalsConfig& config) {
  const track::Trajectory& traj = result.trajectories.at(index);
  const TargetSeries& s = result.series.at(index);
  const SlowTimeSeries& x = method == ExtractionMethod::energy ? s.energy : s.phase;

  vitals::VitalsReport rep;
  const std::size_t segment = config.welch.segment_length
                                  ? config.welch.segment_length
                                  : static_cast<std::size_t>(std::llround(30.0 * x.sample_rate_hz));
  if (x.size() >= segment) {
    rep = vitals::extract_vitals(x, config);
  } else {
    rep.raw = x;
    rep.respiration.rate_bpm = rep.heart.rate_bpm = std::numeric_limits<double>::quiet_NaN();
  }
  rep.trajectory_id = traj.id;
  rep.source = to_string(method);
  rep.first_frame = s.first_frame;
  double r = 0.0, a = 0.0;
  for (const auto& p : traj.points) {
    r += p.range_m;
    a += p.angle_deg;
  }
  rep.range_m = r / static_cast<double>(traj.points.size());
  rep.angle_deg = a / static_cast<double>(traj.points.size());
  return rep;
}

void simulate_to_raw(const sim::SceneSpec& scene, const RadarConfig& config, const std::filesystem::path& raw) {
  std::vector<Complex> frame;
  double peak = 0.0;
  {
    sim::SceneSynthesizer synth(scene, config);
    frame.resize(synth.frame_size());
    for (std::size_t f = 0; f < config.num_frames; ++f) {
      synth.synthesize_frame(f, frame);
      peak = std::max(peak, sim::max_abs_component(frame));
    }
  }
  sim::SceneSynthesizer synth(scene, config);
  sim::RawWriter writer(raw, config, sim::raw_scale_for(peak));
  for (std::size_t f = 0; f < config.num_frames; ++f) {
    synth.synthesize_frame(f, frame);
    writer.write_frame(frame);
  }
  writer.close();
}

void RunManifest::validate() const {
  if (config_path.empty()) throw ConfigError("manifest: config path is required");
  if (raw_path.has_value() == scene_path.has_value()) {
    throw ConfigError("manifest: exactly one of raw file or scene file must be given");
  }
  if (seed && raw_path) throw ConfigError("manifest: seed only applies to a scene input");
  if (output_dir.empty()) throw ConfigError("manifest: output directory is required");
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec || !std::filesystem::is_directory(output_dir)) {
    throw ConfigError("manifest: cannot create output directory " + output_dir.string());
  }
  const auto probe = output_dir / ".mdv_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw ConfigError("manifest: output directory is not writable: " + output_dir.string());
  }
  std::filesystem::remove(probe, ec);
}

}  // namespace mdv::pipeline
