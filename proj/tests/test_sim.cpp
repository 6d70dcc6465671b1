#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "mdv/dsp/spectral.hpp"
#include "mdv/rd/range_doppler.hpp"
#include "mdv/sim/raw_io.hpp"
#include "mdv/sim/scene.hpp"
#include "mdv/vitals/extraction.hpp"

using namespace mdv;
using namespace mdv::sim;

namespace {

RadarConfig small_config(std::size_t frames) {
  RadarConfig c;
  c.num_frames = frames;
  c.chirps_per_frame = 8;
  return c;
}

SubjectSpec still_subject(double range_m, double angle_deg) {
  SubjectSpec s;
  s.range_m = range_m;
  s.angle_deg = angle_deg;
  s.resp_displacement_m = 0.0;
  s.heart_displacement_m = 0.0;
  s.rcs_resp_mod = 0.0;
  s.rcs_heart_mod = 0.0;
  return s;
}

std::size_t peak_bin(const rd::RangeProfileFrame& p, std::size_t rx, std::size_t chirp) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < p.range_bins; ++k) {
    if (std::norm(p.at(rx, chirp, k)) > std::norm(p.at(rx, chirp, best))) best = k;
  }
  return best;
}

std::filesystem::path temp_path(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mdv_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("scene") {
  TEST_CASE("static target peaks at the expected bin in every frame") {
    const RadarConfig c = small_config(20);
    SceneSpec scene;
    scene.subjects = {still_subject(2.0, 0.0)};
    const DataCube cube = simulate(scene, c);
    const auto dq = derive_quantities(c);
    const auto expected = static_cast<std::size_t>(std::lround(2.0 / dq.range_bin_spacing_m));
    CHECK(expected == 95);
    const auto profiles = rd::range_fft(cube);
    for (const auto& p : profiles.frames) {
      for (std::size_t r = 0; r < c.num_rx; ++r) CHECK(peak_bin(p, r, 0) == expected);
    }
  }

  TEST_CASE("default subject at 2 m also peaks at bin 95") {
    const RadarConfig c = small_config(50);
    SceneSpec scene;
    scene.subjects = {SubjectSpec{}};
    const auto profiles = rd::range_fft(simulate(scene, c));
    for (const auto& p : profiles.frames) CHECK(peak_bin(p, 0, 3) == 95);
  }

  TEST_CASE("same seed gives identical cubes, a new seed does not") {
    const RadarConfig c = small_config(3);
    SceneSpec scene;
    scene.subjects = {SubjectSpec{}};
    scene.noise_stddev = 0.1;
    scene.phase_jitter_rad = 0.2;
    scene.seed = 42;
    const DataCube a = simulate(scene, c), b = simulate(scene, c);
    CHECK(std::memcmp(a.data().data(), b.data().data(), a.data().size_bytes()) == 0);
    scene.seed = 43;
    const DataCube d = simulate(scene, c);
    CHECK(std::memcmp(a.data().data(), d.data().data(), a.data().size_bytes()) != 0);
  }

  TEST_CASE("frames can be synthesised out of order") {
    const RadarConfig c = small_config(5);
    SceneSpec scene;
    scene.subjects = {SubjectSpec{}};
    scene.noise_stddev = 0.05;
    scene.seed = 9;
    const DataCube cube = simulate(scene, c);
    SceneSynthesizer synth(scene, c);
    std::vector<Complex> frame(synth.frame_size());
    synth.synthesize_frame(3, frame);
    CHECK(std::memcmp(frame.data(), cube.frame(3).data(), frame.size() * sizeof(Complex)) == 0);
  }

  TEST_CASE("noiseless scenes superpose") {
    const RadarConfig c = small_config(10);
    SubjectSpec a;
    a.range_m = 1.5;
    a.angle_deg = -20.0;
    SubjectSpec b;
    b.range_m = 3.1;
    b.angle_deg = 35.0;
    b.respiration_hz = 0.4;
    SceneSpec sa, sb, both;
    sa.subjects = {a};
    sb.subjects = {b};
    both.subjects = {a, b};
    const DataCube ca = simulate(sa, c), cb = simulate(sb, c), cab = simulate(both, c);
    double err = 0.0;
    for (std::size_t i = 0; i < cab.data().size(); ++i) {
      err = std::max(err, std::abs(cab.data()[i] - (ca.data()[i] + cb.data()[i])));
    }
    CHECK(err < 1e-12);
  }

  TEST_CASE("RCS modulation shows up in the bin energy within 1%") {
    RadarConfig c = small_config(200);
    SubjectSpec s = still_subject(2.0, 0.0);
    s.rcs_resp_mod = 0.3;
    s.rcs_heart_mod = 0.08;
    s.resp_phase_rad = 0.4;
    s.heart_phase_rad = 1.1;
    SceneSpec scene;
    scene.subjects = {s};
    const auto stack = rd::range_doppler(simulate(scene, c));
    const std::size_t d0 = stack.frames[0].zero_doppler();
    std::vector<double> ratio;
    for (std::size_t f = 0; f < stack.frames.size(); ++f) {
      double e = 0.0;
      for (std::size_t r = 0; r < c.num_rx; ++r) e += std::norm(stack.frames[f].at(r, d0, 95));
      const double t = static_cast<double>(f) * c.frame_time_s;
      const double gamma = s.rcs_static + s.rcs_resp_mod * std::cos(2.0 * std::numbers::pi * s.respiration_hz * t + s.resp_phase_rad) +
                           s.rcs_heart_mod * std::cos(2.0 * std::numbers::pi * s.heart_hz * t + s.heart_phase_rad);
      ratio.push_back(e / gamma);
    }
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    CHECK((*hi - *lo) / *lo < 0.01);
  }

  TEST_CASE("respiration RCS modulation gives an energy peak at f_r") {
    RadarConfig c = small_config(3000);
    SubjectSpec s = still_subject(2.0, 10.0);
    s.rcs_resp_mod = 0.2;
    s.respiration_hz = 0.25;
    SceneSpec scene;
    scene.subjects = {s};
    scene.noise_stddev = noise_stddev_for_snr(subject_amplitude(s, scene), 10.0);
    scene.seed = 3;
    SceneSynthesizer synth(scene, c);
    rd::RangeDopplerProcessor proc(c);
    std::vector<Complex> raw(synth.frame_size());
    rd::RangeProfileFrame scratch;
    rd::RangeDopplerFrame map;
    SlowTimeSeries e{{}, 100.0};
    for (std::size_t f = 0; f < c.num_frames; ++f) {
      synth.synthesize_frame(f, raw);
      proc.process(raw, scratch, map);
      e.values.push_back(vitals::window_energy(map, map.zero_doppler(), 95, {}));
    }
    double mean = 0.0;
    for (double v : e.values) mean += v;
    mean /= static_cast<double>(e.size());
    for (double& v : e.values) v -= mean;
    const auto psd = dsp::welch_psd(e);
    const auto it = std::max_element(psd.power.begin(), psd.power.end());
    CHECK(std::fabs(psd.freqs_hz[static_cast<std::size_t>(it - psd.power.begin())] - 0.25) <= psd.bin_width_hz());
  }

  TEST_CASE("validation rejects impossible scenes") {
    const RadarConfig c;
    SceneSpec scene;
    scene.subjects = {SubjectSpec{}};
    CHECK_NOTHROW(validate_scene(scene, c));
    scene.subjects[0].range_m = 6.0;  // beyond the 5.4 m unambiguous range
    CHECK_THROWS_AS(validate_scene(scene, c), ConfigError);
    scene.subjects[0] = SubjectSpec{};
    scene.subjects[0].heart_hz = 4.0;
    CHECK_THROWS_AS(validate_scene(scene, c), ConfigError);
    scene.allow_nonphysiological = true;
    CHECK_NOTHROW(validate_scene(scene, c));
    scene.subjects[0] = SubjectSpec{};
    scene.subjects[0].rcs_resp_mod = 1.5;
    CHECK_THROWS_AS(validate_scene(scene, c), ConfigError);
    scene.subjects[0] = SubjectSpec{};
    scene.subjects[0].angle_deg = 95.0;
    CHECK_THROWS_AS(validate_scene(scene, c), ConfigError);
    scene.subjects[0] = SubjectSpec{};
    scene.noise_stddev = -1.0;
    CHECK_THROWS_AS(validate_scene(scene, c), ConfigError);
  }

  TEST_CASE("scene JSON round trip and diagnostics") {
    SceneSpec scene;
    scene.subjects = {SubjectSpec{}, still_subject(3.0, -12.5)};
    scene.noise_stddev = 0.02;
    scene.motion_artifact = MotionArtifact{0.005, 0.05};
    scene.phase_jitter_rad = 0.8;
    scene.seed = 1234;
    const SceneSpec back = parse_scene(scene_to_json(scene));
    CHECK(scene_to_json(back) == scene_to_json(scene));
    CHECK(back.subjects.size() == 2);
    CHECK(back.motion_artifact->amplitude_m == 0.005);
    CHECK_THROWS_AS(parse_scene(R"({"subjects": [{"range": 2.0}]})"), ConfigError);
    CHECK_THROWS_AS(parse_scene(R"({"noise_stddev": "loud"})"), ConfigError);
    CHECK_THROWS_AS(parse_scene("[1, 2"), ConfigError);
    CHECK(parse_scene("{}").subjects.empty());
  }

  TEST_CASE("noise for a target SNR") {
    CHECK(noise_stddev_for_snr(1.0, 20.0) == doctest::Approx(0.1));
    CHECK(noise_stddev_for_snr(0.25, 0.0) == doctest::Approx(0.25));
    SceneSpec scene;
    SubjectSpec s;
    s.range_m = 2.0;
    CHECK(subject_amplitude(s, scene) == doctest::Approx(0.25));
  }
}

TEST_SUITE("raw format") {
  TEST_CASE("byte length formula") {
    RadarConfig c;
    c.num_frames = 7;
    CHECK(raw_byte_length(c) == 7ull * 4 * 64 * 128 * 2 * 2);
  }

  TEST_CASE("zero cube writes an all-zero body of exact length") {
    RadarConfig c = small_config(3);
    const DataCube cube(c);
    const auto path = temp_path("zero.raw");
    write_raw(cube, path);
    CHECK(std::filesystem::file_size(path) == raw_byte_length(c));
    std::ifstream in(path, std::ios::binary);
    std::vector<char> bytes(raw_byte_length(c));
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    CHECK(std::all_of(bytes.begin(), bytes.end(), [](char b) { return b == 0; }));
    const auto hdr = read_sidecar(path);
    CHECK(hdr.scale == 1.0);
    CHECK(hdr.frames == 3);
  }

  TEST_CASE("round trip stays within the quantisation bound") {
    RadarConfig c = small_config(2);
    c.chirps_per_frame = 4;
    std::mt19937_64 rng(17);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
      DataCube cube(c);
      for (auto& z : cube.data()) z = Complex(g(rng), g(rng)) * (1.0 + trial);
      const auto path = temp_path("rt.raw");
      write_raw(cube, path);
      const DataCube back = read_raw(path, c);
      const double full_scale = max_abs_component(cube.data()) / 0.9;
      double err = 0.0;
      for (std::size_t i = 0; i < cube.data().size(); ++i) {
        err = std::max({err, std::fabs(cube.data()[i].real() - back.data()[i].real()),
                        std::fabs(cube.data()[i].imag() - back.data()[i].imag())});
      }
      CHECK(err <= full_scale / 32768.0);
    }
  }

  TEST_CASE("layout is frame, rx, chirp, sample with I before Q") {
    RadarConfig c = small_config(2);
    c.num_rx = 2;
    c.chirps_per_frame = 2;
    c.samples_per_chirp = 4;
    c.range_fft_size = 4;
    DataCube cube(c);
    cube.at(1, 1, 0, 2) = Complex(1.0, -0.5);
    const auto path = temp_path("layout.raw");
    write_raw(cube, path);
    std::ifstream in(path, std::ios::binary);
    std::vector<std::int16_t> v(raw_byte_length(c) / 2);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(raw_byte_length(c)));
    const std::size_t idx = (((1 * 2 + 1) * 2 + 0) * 4 + 2) * 2;
    CHECK(v[idx] == static_cast<std::int16_t>(std::lround(0.9 * 32767.0)));
    CHECK(v[idx + 1] == static_cast<std::int16_t>(std::lround(-0.5 * 0.9 * 32767.0)));
    std::size_t nonzero = 0;
    for (auto s : v) nonzero += s != 0;
    CHECK(nonzero == 2);
  }

  TEST_CASE("wrong byte length is a dimension error") {
    RadarConfig c = small_config(2);
    write_raw(DataCube(c), temp_path("short.raw"));
    RadarConfig other = c;
    other.num_frames = 3;
    CHECK_THROWS_AS(read_raw(temp_path("short.raw"), other), DimensionError);
  }

  TEST_CASE("writer rejects overflow and short captures") {
    RadarConfig c = small_config(2);
    SceneSynthesizer synth(SceneSpec{}, c);
    std::vector<Complex> frame(synth.frame_size(), Complex(2.0, 0.0));
    {
      RawWriter w(temp_path("ovf.raw"), c, 32767.0);
      CHECK_THROWS_AS(w.write_frame(frame), DataError);
    }
    RawWriter w(temp_path("partial.raw"), c, 1000.0);
    w.write_frame(frame);
    CHECK_THROWS_AS(w.close(), DataError);
  }

  TEST_CASE("sidecar records the config hash") {
    RadarConfig c = small_config(2);
    write_raw(DataCube(c), temp_path("hash.raw"));
    RawReader r(temp_path("hash.raw"), c);
    CHECK(r.config_hash_matches());
    CHECK(r.header().config_hash == config_hash(c));
    RadarConfig shifted = c;
    shifted.center_frequency_hz = 60e9;
    RawReader r2(temp_path("hash.raw"), shifted);
    CHECK_FALSE(r2.config_hash_matches());
  }
}
