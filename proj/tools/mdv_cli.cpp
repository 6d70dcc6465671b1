// mdv: simulate, process, evaluate and bench from the command line.

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mdv/core/config.hpp"
#include "mdv/pipeline/bench.hpp"
#include "mdv/pipeline/evaluate.hpp"
#include "mdv/pipeline/pipeline.hpp"
#include "mdv/rd/range_doppler.hpp"
#include "mdv/sim/scene.hpp"
#include "mdv/track/tracker.hpp"
#include "mdv/vitals/vitals.hpp"

namespace fs = std::filesystem;
using namespace mdv;

namespace {

enum Exit : int { kOk = 0, kOther = 1, kConfig = 2, kData = 3, kNoTargets = 4 };

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text << '\n';
}

struct SimulateArgs {
  std::string scene, config, out, truth;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a) {
  const RadarConfig config = load_config(a.config);
  sim::SceneSpec scene = sim::load_scene(a.scene);
  if (a.seed) scene.seed = *a.seed;
  sim::validate_scene(scene, config);
  const fs::path raw(a.out);
  if (raw.has_parent_path()) fs::create_directories(raw.parent_path());
  pipeline::simulate_to_raw(scene, config, raw);
  const fs::path truth = a.truth.empty() ? fs::path(a.out + ".truth.json") : fs::path(a.truth);
  write_text(truth, pipeline::truth_to_json(scene, config));
  std::printf("wrote %s (%zu frames, %zu subjects), truth %s\n", raw.string().c_str(), config.num_frames,
              scene.subjects.size(), truth.string().c_str());
  return kOk;
}

struct ProcessArgs {
  std::string raw, scene, config, out_dir, method = "energy", detection_mode = "variance";
  std::optional<std::uint64_t> seed;
  bool dump = false;
};

int cmd_process(const ProcessArgs& a) {
  pipeline::RunManifest manifest;
  manifest.config_path = a.config;
  if (!a.raw.empty()) manifest.raw_path = a.raw;
  if (!a.scene.empty()) manifest.scene_path = a.scene;
  manifest.output_dir = a.out_dir;
  manifest.seed = a.seed;
  manifest.validate();

  std::vector<pipeline::ExtractionMethod> methods;
  if (a.method == "both") {
    methods = {pipeline::ExtractionMethod::energy, pipeline::ExtractionMethod::phase};
  } else {
    methods = {pipeline::parse_extraction_method(a.method)};
  }

  const RadarConfig config = load_config(manifest.config_path);
  pipeline::PipelineConfig pc;
  pc.detector.mode = track::parse_detection_mode(a.detection_mode);
  if (a.dump) pc.keep_frame = config.num_frames / 2;

  std::unique_ptr<pipeline::FrameSource> source;
  if (manifest.raw_path) {
    auto raw = std::make_unique<pipeline::RawFileSource>(*manifest.raw_path, config);
    if (!raw->reader().config_hash_matches()) {
      std::fprintf(stderr, "warning: %s was written with a different config\n", manifest.raw_path->string().c_str());
    }
    source = std::move(raw);
  } else {
    sim::SceneSpec scene = sim::load_scene(*manifest.scene_path);
    if (manifest.seed) scene.seed = *manifest.seed;
    source = std::make_unique<pipeline::SimulatedSource>(scene, config);
  }
  const pipeline::PipelineResult result = pipeline::run_pipeline(*source, pc);
  if (result.timings.frames != config.num_frames) {
    throw DataError("input ended after " + std::to_string(result.timings.frames) + " of " +
                    std::to_string(config.num_frames) + " frames");
  }

  const fs::path out(manifest.output_dir);
  track::write_trajectories_csv(result.trajectories, out / "trajectories.csv");
  if (a.dump) {
    const auto dq = derive_quantities(config);
    if (result.kept_profiles) rd::write_range_profile_csv(*result.kept_profiles, dq.range_bin_spacing_m, out / "range_profile.csv");
    if (result.kept_map) rd::write_magnitude_csv(*result.kept_map, out / "rd_map.csv");
  }

  nlohmann::ordered_json summary;
  summary["status"] = result.trajectories.empty() ? "no_targets" : "ok";
  summary["frames"] = result.timings.frames;
  summary["detection_mode"] = track::to_string(pc.detector.mode);
  summary["trajectories"] = result.trajectories.size();
  summary["reports"] = nlohmann::ordered_json::array();
  for (const auto m : methods) {
    for (std::size_t i = 0; i < result.trajectories.size(); ++i) {
      const vitals::VitalsReport report = pipeline::estimate_target(result, i, m, pc.vitals);
      const std::string stem = std::string(pipeline::to_string(m)) + "_" + std::to_string(report.trajectory_id);
      write_text(out / ("report_" + stem + ".json"), vitals::report_to_json(report));
      if (a.dump) vitals::write_intermediate_csv(report, out / ("series_" + stem + ".csv"));
      summary["reports"].push_back("report_" + stem + ".json");
    }
  }
  write_text(out / "summary.json", summary.dump(2));

  // Wall-clock figures change run to run, so they live apart from reports.
  nlohmann::ordered_json timings;
  timings["source_s"] = result.timings.source_s;
  timings["range_fft_s"] = result.timings.range_fft_s;
  timings["doppler_fft_s"] = result.timings.doppler_fft_s;
  timings["detection_s"] = result.timings.detection_s;
  timings["tracking_s"] = result.timings.tracking_s;
  timings["extraction_s"] = result.timings.extraction_s;
  write_text(out / "timings.json", timings.dump(2));

  std::printf("%zu frames, %zu trajectories -> %s\n", result.timings.frames, result.trajectories.size(),
              out.string().c_str());
  if (result.trajectories.empty()) {
    std::fprintf(stderr, "mdv: no targets detected\n");
    return kNoTargets;
  }
  return kOk;
}

struct EvaluateArgs {
  std::string reports, truth, out;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const auto truth = pipeline::parse_truth(read_text(a.truth));
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.reports)) {
    const std::string name = e.path().filename().string();
    if (name.rfind("report_", 0) == 0 && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<pipeline::ReportSummary> reports;
  for (const auto& f : files) reports.push_back(pipeline::parse_report(read_text(f)));
  const std::string json = pipeline::metrics_to_json(pipeline::evaluate(reports, truth));
  if (a.out.empty()) {
    std::cout << json << '\n';
  } else {
    write_text(a.out, json);
  }
  return kOk;
}

struct BenchArgs {
  std::string config, out;
  std::size_t frames = 4000;
  std::size_t range_fft_size = 0;
  std::uint64_t seed = 7;
};

int cmd_bench(const BenchArgs& a) {
  pipeline::BenchOptions opt;
  if (!a.config.empty()) opt.config = load_config(a.config);
  if (a.range_fft_size) opt.config.range_fft_size = a.range_fft_size;
  opt.frames = a.frames;
  opt.seed = a.seed;
  const std::string json = pipeline::bench_to_json(pipeline::run_bench(opt));
  if (a.out.empty()) {
    std::cout << json << '\n';
  } else {
    write_text(a.out, json);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mdv: FMCW radar vital-signs toolkit"};
  app.require_subcommand(1);

  SimulateArgs sa;
  auto* sim = app.add_subcommand("simulate", "Synthesise a scene into a raw capture and truth JSON");
  sim->add_option("--scene", sa.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--config", sa.config, "Radar config JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--out", sa.out, "Raw output file")->required();
  sim->add_option("--truth", sa.truth, "Truth JSON (default <out>.truth.json)");
  sim->add_option("--seed", sa.seed, "Override the scene seed");

  ProcessArgs pa;
  auto* proc = app.add_subcommand("process", "Run detection, tracking and vitals estimation");
  auto* raw_opt = proc->add_option("--raw", pa.raw, "Raw capture")->check(CLI::ExistingFile);
  auto* scene_opt = proc->add_option("--scene", pa.scene, "Scene JSON, simulated in memory")->check(CLI::ExistingFile);
  raw_opt->excludes(scene_opt);
  proc->add_option("--seed", pa.seed, "Override the scene seed")->needs(scene_opt);
  proc->add_option("--config", pa.config, "Radar config JSON")->required()->check(CLI::ExistingFile);
  proc->add_option("--out-dir", pa.out_dir, "Output directory")->required();
  proc->add_option("--method", pa.method, "Slow-time signal")
      ->check(CLI::IsMember({"energy", "phase", "both"}));
  proc->add_option("--detection-mode", pa.detection_mode, "Detection map")
      ->check(CLI::IsMember({"variance", "doppler", "auto"}));
  proc->add_flag("--dump-intermediate", pa.dump, "Write range profile, RD map and series CSVs");

  EvaluateArgs ea;
  auto* eval = app.add_subcommand("evaluate", "Score reports against truth");
  eval->add_option("--reports", ea.reports, "Directory of report_*.json")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--truth", ea.truth, "Truth JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", ea.out, "Metrics JSON (default stdout)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Per-stage timings on a two-subject workload");
  bench->add_option("--config", ba.config, "Radar config JSON")->check(CLI::ExistingFile);
  bench->add_option("--frames", ba.frames, "Frames to process")->check(CLI::PositiveNumber);
  bench->add_option("--range-fft-size", ba.range_fft_size, "Override range FFT size");
  bench->add_option("--seed", ba.seed, "Scene seed");
  bench->add_option("--out", ba.out, "Timing JSON (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (sim->parsed()) return cmd_simulate(sa);
    if (proc->parsed()) {
      if (pa.raw.empty() == pa.scene.empty()) throw ConfigError("process: give exactly one of --raw or --scene");
      return cmd_process(pa);
    }
    if (eval->parsed()) return cmd_evaluate(ea);
    if (bench->parsed()) return cmd_bench(ba);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "mdv: config error: %s\n", e.what());
    return kConfig;
  } catch (const DataError& e) {
    std::fprintf(stderr, "mdv: data error: %s\n", e.what());
    return kData;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "mdv: data error: %s\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mdv: %s\n", e.what());
    return kOther;
  }
  return kOther;
}
