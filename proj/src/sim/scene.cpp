#include "mdv/sim/scene.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <boost/random/normal_distribution.hpp>
#include <json.hpp>

namespace mdv::sim {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, frame, stream).
std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t frame, std::uint64_t stream) {
  return splitmix64(splitmix64(splitmix64(seed) ^ frame) ^ (stream * 0xD1B54A32D192ED03ULL));
}

void fail(const std::string& what) { throw ConfigError("scene: " + what); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) fail("unknown field '" + it.key() + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean()) fail(std::string("field '") + key + "' in " + where + " must be a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_unsigned()) {
        fail(std::string("field '") + key + "' in " + where + " must be a non-negative integer");
      }
    } else {
      if (!it->is_number()) fail(std::string("field '") + key + "' in " + where + " must be a number");
    }
    out = it->template get<T>();
  } catch (const json::exception& e) {
    fail(std::string("field '") + key + "' in " + where + ": " + e.what());
  }
}

}  // namespace

void validate_scene(const SceneSpec& scene, const RadarConfig& config) {
  const DerivedQuantities q = derive_quantities(config);
  if (!(scene.noise_stddev >= 0.0) || !std::isfinite(scene.noise_stddev)) fail("noise_stddev must be >= 0");
  if (!(scene.phase_jitter_rad >= 0.0) || !std::isfinite(scene.phase_jitter_rad)) {
    fail("phase_jitter_rad must be >= 0");
  }
  if (!(scene.amplitude_scale > 0.0) || !std::isfinite(scene.amplitude_scale)) {
    fail("amplitude_scale must be > 0");
  }
  double motion = 0.0;
  if (scene.motion_artifact) {
    if (!(scene.motion_artifact->amplitude_m >= 0.0)) fail("motion_artifact.amplitude_m must be >= 0");
    if (!(scene.motion_artifact->frequency_hz >= 0.0)) fail("motion_artifact.frequency_hz must be >= 0");
    motion = scene.motion_artifact->amplitude_m;
  }
  for (std::size_t i = 0; i < scene.subjects.size(); ++i) {
    const SubjectSpec& s = scene.subjects[i];
    const std::string who = "subject " + std::to_string(i) + ": ";
    if (!(std::fabs(s.angle_deg) <= 90.0)) fail(who + "angle_deg must lie in [-90, 90]");
    if (!(s.rcs_static > 0.0)) fail(who + "rcs_static must be > 0");
    if (!(s.rcs_resp_mod >= 0.0 && s.rcs_resp_mod < s.rcs_static)) {
      fail(who + "rcs_resp_mod must lie in [0, rcs_static)");
    }
    if (!(s.rcs_heart_mod >= 0.0 && s.rcs_heart_mod < s.rcs_static)) {
      fail(who + "rcs_heart_mod must lie in [0, rcs_static)");
    }
    if (!(s.resp_displacement_m >= 0.0 && s.heart_displacement_m >= 0.0)) {
      fail(who + "displacements must be >= 0");
    }
    if (!(s.respiration_hz >= 0.0 && s.heart_hz >= 0.0)) fail(who + "rates must be >= 0");
    if (!scene.allow_nonphysiological) {
      if (!(s.respiration_hz >= 0.1 && s.respiration_hz <= 0.8)) {
        fail(who + "respiration_hz outside [0.1, 0.8] (set allow_nonphysiological to override)");
      }
      if (!(s.heart_hz >= 0.8 && s.heart_hz <= 3.0)) {
        fail(who + "heart_hz outside [0.8, 3.0] (set allow_nonphysiological to override)");
      }
    }
    const double excursion = s.resp_displacement_m + s.heart_displacement_m + motion;
    if (!(s.range_m - excursion > 0.0)) fail(who + "range_m must exceed the total chest excursion");
    if (!(s.range_m + excursion < q.max_unambiguous_range_m)) {
      fail(who + "range " + std::to_string(s.range_m) + " m is beyond the unambiguous range of " +
           std::to_string(q.max_unambiguous_range_m) + " m");
    }
  }
}

SceneSpec parse_scene(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be an object");
  check_keys(j,
             {"subjects", "noise_stddev", "motion_artifact", "phase_jitter_rad", "amplitude_scale",
              "seed", "allow_nonphysiological"},
             "scene");
  SceneSpec scene;
  read(j, "noise_stddev", scene.noise_stddev, "scene");
  read(j, "phase_jitter_rad", scene.phase_jitter_rad, "scene");
  read(j, "amplitude_scale", scene.amplitude_scale, "scene");
  read(j, "seed", scene.seed, "scene");
  read(j, "allow_nonphysiological", scene.allow_nonphysiological, "scene");
  if (auto it = j.find("motion_artifact"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) fail("motion_artifact must be an object");
    check_keys(*it, {"amplitude_m", "frequency_hz"}, "motion_artifact");
    MotionArtifact m;
    read(*it, "amplitude_m", m.amplitude_m, "motion_artifact");
    read(*it, "frequency_hz", m.frequency_hz, "motion_artifact");
    scene.motion_artifact = m;
  }
  if (auto it = j.find("subjects"); it != j.end()) {
    if (!it->is_array()) fail("subjects must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& sj = (*it)[i];
      const std::string where = "subjects[" + std::to_string(i) + "]";
      if (!sj.is_object()) fail(where + " must be an object");
      check_keys(sj,
                 {"range_m", "angle_deg", "respiration_hz", "heart_hz", "resp_displacement_m",
                  "heart_displacement_m", "rcs_static", "rcs_resp_mod", "rcs_heart_mod",
                  "resp_phase_rad", "heart_phase_rad"},
                 where);
      SubjectSpec s;
      read(sj, "range_m", s.range_m, where);
      read(sj, "angle_deg", s.angle_deg, where);
      read(sj, "respiration_hz", s.respiration_hz, where);
      read(sj, "heart_hz", s.heart_hz, where);
      read(sj, "resp_displacement_m", s.resp_displacement_m, where);
      read(sj, "heart_displacement_m", s.heart_displacement_m, where);
      read(sj, "rcs_static", s.rcs_static, where);
      read(sj, "rcs_resp_mod", s.rcs_resp_mod, where);
      read(sj, "rcs_heart_mod", s.rcs_heart_mod, where);
      read(sj, "resp_phase_rad", s.resp_phase_rad, where);
      read(sj, "heart_phase_rad", s.heart_phase_rad, where);
      scene.subjects.push_back(s);
    }
  }
  return scene;
}

SceneSpec load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str());
}

std::string scene_to_json(const SceneSpec& scene) {
  nlohmann::ordered_json j;
  j["noise_stddev"] = scene.noise_stddev;
  j["phase_jitter_rad"] = scene.phase_jitter_rad;
  j["amplitude_scale"] = scene.amplitude_scale;
  j["seed"] = scene.seed;
  j["allow_nonphysiological"] = scene.allow_nonphysiological;
  if (scene.motion_artifact) {
    j["motion_artifact"] = {{"amplitude_m", scene.motion_artifact->amplitude_m},
                            {"frequency_hz", scene.motion_artifact->frequency_hz}};
  }
  j["subjects"] = nlohmann::ordered_json::array();
  for (const SubjectSpec& s : scene.subjects) {
    nlohmann::ordered_json sj;
    sj["range_m"] = s.range_m;
    sj["angle_deg"] = s.angle_deg;
    sj["respiration_hz"] = s.respiration_hz;
    sj["heart_hz"] = s.heart_hz;
    sj["resp_displacement_m"] = s.resp_displacement_m;
    sj["heart_displacement_m"] = s.heart_displacement_m;
    sj["rcs_static"] = s.rcs_static;
    sj["rcs_resp_mod"] = s.rcs_resp_mod;
    sj["rcs_heart_mod"] = s.rcs_heart_mod;
    sj["resp_phase_rad"] = s.resp_phase_rad;
    sj["heart_phase_rad"] = s.heart_phase_rad;
    j["subjects"].push_back(sj);
  }
  return j.dump(2);
}

double subject_amplitude(const SubjectSpec& subject, const SceneSpec& scene) {
  return scene.amplitude_scale * std::sqrt(subject.rcs_static) / (subject.range_m * subject.range_m);
}

double noise_stddev_for_snr(double amplitude, double snr_db) {
  return amplitude / std::pow(10.0, snr_db / 20.0);
}

double subject_range(const SubjectSpec& s, const SceneSpec& scene, double t) {
  double r = s.range_m + s.resp_displacement_m * std::sin(kTwoPi * s.respiration_hz * t + s.resp_phase_rad) +
             s.heart_displacement_m * std::sin(kTwoPi * s.heart_hz * t + s.heart_phase_rad);
  if (scene.motion_artifact) {
    r += scene.motion_artifact->amplitude_m * std::sin(kTwoPi * scene.motion_artifact->frequency_hz * t);
  }
  return r;
}

SceneSynthesizer::SceneSynthesizer(SceneSpec scene, RadarConfig config)
    : scene_(std::move(scene)), config_(config), derived_(derive_quantities(config_)) {
  validate_scene(scene_, config_);
}

std::size_t SceneSynthesizer::frame_size() const {
  return config_.num_rx * config_.chirps_per_frame * config_.samples_per_chirp;
}

void SceneSynthesizer::synthesize_frame(std::size_t frame, std::span<Complex> out) const {
  const std::size_t rx = config_.num_rx, chirps = config_.chirps_per_frame,
                    ns = config_.samples_per_chirp;
  if (out.size() != frame_size()) throw DimensionError("synthesize_frame: output span has wrong size");

  // Stop-and-hop: every chirp of a frame sees the same range, so one chirp
  // per antenna is built and replicated.
  std::vector<Complex> chirp(rx * ns, Complex{});
  const double t = static_cast<double>(frame) * config_.frame_time_s;
  for (std::size_t si = 0; si < scene_.subjects.size(); ++si) {
    const SubjectSpec& s = scene_.subjects[si];
    const double r = subject_range(s, scene_, t);
    const double gamma2 =
        s.rcs_static + s.rcs_resp_mod * std::cos(kTwoPi * s.respiration_hz * t + s.resp_phase_rad) +
        s.rcs_heart_mod * std::cos(kTwoPi * s.heart_hz * t + s.heart_phase_rad);
    const double amp = scene_.amplitude_scale * std::sqrt(std::max(gamma2, 0.0)) / (r * r);

    // Carrier term 2 fc R / c in cycles; keep only the fractional part.
    const double carrier_cycles = 2.0 * config_.center_frequency_hz * r / kSpeedOfLight;
    double phase0 = kTwoPi * (carrier_cycles - std::floor(carrier_cycles));
    if (scene_.phase_jitter_rad > 0.0) {
      std::mt19937_64 rng(sub_seed(scene_.seed, frame, 1 + si));
      phase0 += std::normal_distribution<double>(0.0, scene_.phase_jitter_rad)(rng);
    }
    const double beat_hz = 2.0 * derived_.chirp_rate_hz_per_s * r / kSpeedOfLight;
    const double spatial =
        kTwoPi * config_.antenna_spacing_wavelengths * std::sin(s.angle_deg * std::numbers::pi / 180.0);
    for (std::size_t m = 0; m < rx; ++m) {
      const double phase_m = phase0 + spatial * static_cast<double>(m);
      for (std::size_t n = 0; n < ns; ++n) {
        const double ph = kTwoPi * beat_hz * static_cast<double>(n) / config_.sample_rate_sps + phase_m;
        chirp[m * ns + n] += std::polar(amp, ph);
      }
    }
  }

  for (std::size_t m = 0; m < rx; ++m) {
    for (std::size_t c = 0; c < chirps; ++c) {
      std::copy_n(chirp.begin() + static_cast<std::ptrdiff_t>(m * ns), ns,
                  out.begin() + static_cast<std::ptrdiff_t>((m * chirps + c) * ns));
    }
  }
  if (scene_.noise_stddev > 0.0) {
    std::mt19937_64 rng(sub_seed(scene_.seed, frame, 0));
    // Ziggurat sampler; the noise dominates synthesis time.
    boost::random::normal_distribution<double> noise(0.0, scene_.noise_stddev / std::numbers::sqrt2);
    for (Complex& z : out) {
      const double re = noise(rng);
      z += Complex(re, noise(rng));
    }
  }
}

DataCube simulate(const SceneSpec& scene, const RadarConfig& config) {
  SceneSynthesizer synth(scene, config);
  DataCube cube(config);
  for (std::size_t f = 0; f < config.num_frames; ++f) synth.synthesize_frame(f, cube.frame(f));
  return cube;
}

}  // namespace mdv::sim
