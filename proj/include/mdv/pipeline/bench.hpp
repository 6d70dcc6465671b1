#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mdv/core/config.hpp"
#include "mdv/pipeline/pipeline.hpp"
#include "mdv/sim/scene.hpp"

namespace mdv::pipeline {

struct BenchOptions {
  RadarConfig config{};
  /// 40 s: one 30 s Welch segment plus detector warm-up.
  std::size_t frames = 4000;
  std::uint64_t seed = 7;
  /// Cell counts for the covariance scaling fit.
  std::vector<std::size_t> covariance_cells{2048, 4096, 8192, 16384};
};

struct BenchResult {
  RadarConfig config;
  StageTimings timings;
  double vitals_s = 0.0;
  std::size_t trajectories = 0;
  /// Frames over processing plus vitals time; the frame source is excluded.
  double frames_per_second = 0.0;
  std::vector<std::size_t> covariance_cells;
  std::vector<double> covariance_seconds;
  double covariance_r2 = 0.0;
};

/// Two seated subjects at 20 dB, the standard throughput workload.
sim::SceneSpec bench_scene(std::uint64_t seed);

BenchResult run_bench(const BenchOptions& options);
std::string bench_to_json(const BenchResult& result);

/// Coefficient of determination of the least-squares line y = a + b x.
double linear_r2(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mdv::pipeline
