#include "mdv/core/config.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mdv {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string("config field '") + name + "' must be a finite value > 0");
  }
}

void require_count(std::size_t v, const char* name) {
  if (v < 1) throw ConfigError(std::string("config field '") + name + "' must be >= 1");
}

template <typename T>
void read_field(const nlohmann::json& j, const char* name, T& out) {
  auto it = j.find(name);
  if (it == j.end()) return;
  try {
    if constexpr (std::is_same_v<T, std::size_t>) {
      if (!it->is_number_integer() || it->template get<long long>() < 0) {
        throw ConfigError(std::string("config field '") + name + "' must be a non-negative integer");
      }
      out = it->template get<std::size_t>();
    } else {
      if (!it->is_number()) {
        throw ConfigError(std::string("config field '") + name + "' must be a number");
      }
      out = it->template get<T>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config field '") + name + "': " + e.what());
  }
}

}  // namespace

void RadarConfig::validate() const {
  require_positive(center_frequency_hz, "center_frequency_hz");
  require_positive(bandwidth_hz, "bandwidth_hz");
  require_positive(chirp_duration_s, "chirp_duration_s");
  require_positive(sample_rate_sps, "sample_rate_sps");
  require_positive(frame_time_s, "frame_time_s");
  require_positive(antenna_spacing_wavelengths, "antenna_spacing_wavelengths");
  require_count(num_frames, "num_frames");
  require_count(num_rx, "num_rx");
  require_count(chirps_per_frame, "chirps_per_frame");
  require_count(samples_per_chirp, "samples_per_chirp");
  require_count(range_fft_size, "range_fft_size");
  if (range_fft_size < samples_per_chirp) {
    throw ConfigError("config field 'range_fft_size' must be >= samples_per_chirp");
  }
  if (!std::has_single_bit(range_fft_size)) {
    throw ConfigError("config field 'range_fft_size' must be a power of two");
  }
  if (!std::has_single_bit(chirps_per_frame)) {
    throw ConfigError("config field 'chirps_per_frame' must be a power of two");
  }
}

DerivedQuantities derive_quantities(const RadarConfig& config) {
  config.validate();
  DerivedQuantities q{};
  q.wavelength_m = kSpeedOfLight / config.center_frequency_hz;
  q.chirp_rate_hz_per_s = config.bandwidth_hz / config.chirp_duration_s;
  q.range_resolution_m = kSpeedOfLight / (2.0 * config.bandwidth_hz);
  q.range_bin_spacing_m = kSpeedOfLight * config.sample_rate_sps /
                          (2.0 * q.chirp_rate_hz_per_s * static_cast<double>(config.range_fft_size));
  q.doppler_bin_spacing_hz =
      1.0 / (static_cast<double>(config.chirps_per_frame) * config.chirp_duration_s);
  q.slow_time_rate_hz = 1.0 / config.frame_time_s;
  q.max_unambiguous_range_m = config.sample_rate_sps * kSpeedOfLight / (2.0 * q.chirp_rate_hz_per_s);
  return q;
}

RadarConfig parse_config(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const char* const kKnown[] = {
      "center_frequency_hz", "bandwidth_hz",     "chirp_duration_s", "sample_rate_sps",
      "num_frames",          "num_rx",           "chirps_per_frame", "samples_per_chirp",
      "frame_time_s",        "range_fft_size",   "antenna_spacing_wavelengths"};
  for (const auto& [key, _] : j.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) throw ConfigError("unknown config field '" + key + "'");
  }

  RadarConfig c;
  read_field(j, "center_frequency_hz", c.center_frequency_hz);
  read_field(j, "bandwidth_hz", c.bandwidth_hz);
  read_field(j, "chirp_duration_s", c.chirp_duration_s);
  read_field(j, "sample_rate_sps", c.sample_rate_sps);
  read_field(j, "num_frames", c.num_frames);
  read_field(j, "num_rx", c.num_rx);
  read_field(j, "chirps_per_frame", c.chirps_per_frame);
  read_field(j, "samples_per_chirp", c.samples_per_chirp);
  read_field(j, "frame_time_s", c.frame_time_s);
  read_field(j, "range_fft_size", c.range_fft_size);
  read_field(j, "antenna_spacing_wavelengths", c.antenna_spacing_wavelengths);
  c.validate();
  return c;
}

RadarConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string config_to_json(const RadarConfig& c) {
  nlohmann::ordered_json j;
  j["center_frequency_hz"] = c.center_frequency_hz;
  j["bandwidth_hz"] = c.bandwidth_hz;
  j["chirp_duration_s"] = c.chirp_duration_s;
  j["sample_rate_sps"] = c.sample_rate_sps;
  j["num_frames"] = c.num_frames;
  j["num_rx"] = c.num_rx;
  j["chirps_per_frame"] = c.chirps_per_frame;
  j["samples_per_chirp"] = c.samples_per_chirp;
  j["frame_time_s"] = c.frame_time_s;
  j["range_fft_size"] = c.range_fft_size;
  j["antenna_spacing_wavelengths"] = c.antenna_spacing_wavelengths;
  return j.dump(2);
}

std::uint64_t config_hash(const RadarConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_to_json(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace mdv
