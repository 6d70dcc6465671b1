#include "mdv/pipeline/bench.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "mdv/simd/kernels.hpp"
#include "mdv/spatial/music.hpp"

namespace mdv::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Best of several repeats, each timing `inner` covariance estimates.
double time_covariance(const rd::RangeDopplerFrame& frame, std::span<const spatial::Cell> cells) {
  constexpr int repeats = 5;
  constexpr int inner = 20;
  double best = 1e300;
  double sink = 0.0;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    for (int i = 0; i < inner; ++i) sink += spatial::estimate_covariance(frame, cells).matrix(0, 0).real();
    best = std::min(best, seconds_since(t0) / inner);
  }
  if (sink < 0.0) throw std::logic_error("bench: negative covariance diagonal");
  return best;
}

}  // namespace

sim::SceneSpec bench_scene(std::uint64_t seed) {
  sim::SceneSpec scene;
  sim::SubjectSpec a;
  a.range_m = 1.8;
  a.angle_deg = -15.0;
  a.respiration_hz = 0.25;
  a.heart_hz = 1.2;
  sim::SubjectSpec b;
  b.range_m = 2.6;
  b.angle_deg = 20.0;
  b.respiration_hz = 0.3;
  b.heart_hz = 1.4;
  scene.subjects = {a, b};
  scene.noise_stddev = sim::noise_stddev_for_snr(sim::subject_amplitude(b, scene), 20.0);
  scene.seed = seed;
  return scene;
}

double linear_r2(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_r2: need two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy * sxy / (sxx * syy);
}

BenchResult run_bench(const BenchOptions& options) {
  RadarConfig config = options.config;
  config.num_frames = options.frames;
  config.validate();

  BenchResult out;
  out.config = config;
  SimulatedSource source(bench_scene(options.seed), config);
  const PipelineResult result = run_pipeline(source);
  out.timings = result.timings;
  out.trajectories = result.trajectories.size();

  const auto t0 = Clock::now();
  for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
    (void)estimate_target(result, i, ExtractionMethod::energy);
  }
  out.vitals_s = seconds_since(t0);
  const double total = out.timings.processing_s() + out.vitals_s;
  out.frames_per_second = total > 0.0 ? static_cast<double>(out.timings.frames) / total : 0.0;

  // Covariance over a random map, with cells taken in row-major order.
  rd::RangeDopplerFrame frame;
  frame.rx = config.num_rx;
  frame.doppler_bins = config.chirps_per_frame;
  frame.range_bins = config.range_fft_size;
  frame.data.resize(frame.rx * frame.doppler_bins * frame.range_bins);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> g;
  for (auto& z : frame.data) z = Complex(g(rng), g(rng));
  std::vector<spatial::Cell> all;
  for (std::size_t d = 0; d < frame.doppler_bins; ++d) {
    for (std::size_t r = 0; r < frame.range_bins; ++r) all.push_back({d, r});
  }
  std::vector<double> xs;
  for (std::size_t n : options.covariance_cells) {
    const std::size_t m = std::min(n, all.size());
    out.covariance_cells.push_back(m);
    out.covariance_seconds.push_back(time_covariance(frame, std::span<const spatial::Cell>(all.data(), m)));
    xs.push_back(static_cast<double>(m));
  }
  out.covariance_r2 = xs.size() >= 2 ? linear_r2(xs, out.covariance_seconds) : 0.0;
  return out;
}

std::string bench_to_json(const BenchResult& r) {
  nlohmann::ordered_json j;
  const double f = r.timings.frames ? static_cast<double>(r.timings.frames) : 1.0;
  j["frames"] = r.timings.frames;
  j["range_fft_size"] = r.config.range_fft_size;
  j["num_rx"] = r.config.num_rx;
  j["chirps_per_frame"] = r.config.chirps_per_frame;
  j["samples_per_chirp"] = r.config.samples_per_chirp;
  j["simd"] = std::string(simd::kernels().name);
  j["trajectories"] = r.trajectories;
  j["ms_per_frame"] = {
      {"range_fft", 1e3 * r.timings.range_fft_s / f},
      {"doppler_fft", 1e3 * r.timings.doppler_fft_s / f},
      {"detection", 1e3 * r.timings.detection_s / f},
      {"tracking", 1e3 * r.timings.tracking_s / f},
      {"extraction", 1e3 * r.timings.extraction_s / f},
      {"vitals", 1e3 * r.vitals_s / f},
  };
  j["simulation_ms_per_frame"] = 1e3 * r.timings.source_s / f;
  j["frames_per_second"] = r.frames_per_second;
  nlohmann::ordered_json cov;
  cov["cells"] = r.covariance_cells;
  cov["seconds"] = r.covariance_seconds;
  cov["r2"] = r.covariance_r2;
  j["covariance_scaling"] = cov;
  return j.dump(2);
}

}  // namespace mdv::pipeline
