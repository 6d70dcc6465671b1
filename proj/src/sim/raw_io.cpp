#include "mdv/sim/raw_io.hpp"

#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace mdv::sim {

namespace {

constexpr double kFullScale = 32767.0;

std::int16_t to_little(std::int16_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    const auto u = static_cast<std::uint16_t>(v);
    return static_cast<std::int16_t>(static_cast<std::uint16_t>((u >> 8) | (u << 8)));
  }
  return v;
}

std::size_t frame_values(const RadarConfig& c) {
  return c.num_rx * c.chirps_per_frame * c.samples_per_chirp * 2;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& raw) {
  return std::filesystem::path(raw.string() + ".hdr");
}

void write_sidecar(const std::filesystem::path& raw, const RawHeader& h) {
  std::ofstream out(sidecar_path(raw));
  if (!out) throw DataError("cannot write sidecar " + sidecar_path(raw).string());
  char scale[64];
  std::snprintf(scale, sizeof scale, "%.17g", h.scale);
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, h.config_hash);
  out << "format int16le_iq\n"
      << "frames " << h.frames << "\n"
      << "rx " << h.rx << "\n"
      << "chirps " << h.chirps << "\n"
      << "samples " << h.samples << "\n"
      << "scale " << scale << "\n"
      << "config_hash " << hash << "\n";
  if (!out) throw DataError("failed writing sidecar " + sidecar_path(raw).string());
}

RawHeader read_sidecar(const std::filesystem::path& raw) {
  const auto path = sidecar_path(raw);
  std::ifstream in(path);
  if (!in) throw DataError("missing sidecar header " + path.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key, value;
    if (ls >> key >> value) kv[key] = value;
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw DataError(path.string() + ": missing key '" + key + "'");
    return it->second;
  };
  if (get("format") != "int16le_iq") throw DataError(path.string() + ": unsupported format");
  RawHeader h;
  try {
    h.frames = std::stoull(get("frames"));
    h.rx = std::stoull(get("rx"));
    h.chirps = std::stoull(get("chirps"));
    h.samples = std::stoull(get("samples"));
    h.scale = std::stod(get("scale"));
    h.config_hash = std::stoull(get("config_hash"), nullptr, 16);
  } catch (const std::logic_error&) {
    throw DataError(path.string() + ": malformed value");
  }
  if (!(h.scale > 0.0) || !std::isfinite(h.scale)) throw DataError(path.string() + ": scale must be > 0");
  return h;
}

std::uint64_t raw_byte_length(const RadarConfig& c) {
  return static_cast<std::uint64_t>(c.num_frames) * frame_values(c) * sizeof(std::int16_t);
}

double raw_scale_for(double max_abs) { return max_abs > 0.0 ? 0.9 * kFullScale / max_abs : 1.0; }

double max_abs_component(std::span<const Complex> samples) {
  double m = 0.0;
  for (const Complex& z : samples) m = std::max({m, std::fabs(z.real()), std::fabs(z.imag())});
  return m;
}

RawWriter::RawWriter(const std::filesystem::path& path, const RadarConfig& config, double scale)
    : path_(path), config_(config), scale_(scale), out_(path, std::ios::binary | std::ios::trunc) {
  config_.validate();
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DataError("raw writer: scale must be > 0");
  if (!out_) throw DataError("cannot open " + path.string() + " for writing");
  buffer_.resize(frame_values(config_));
}

RawWriter::~RawWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
    }
  }
}

void RawWriter::write_frame(std::span<const Complex> frame) {
  if (frame.size() * 2 != buffer_.size()) throw DimensionError("raw writer: frame has wrong size");
  if (frames_written_ >= config_.num_frames) throw DataError("raw writer: more frames than config allows");
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const double iq[2] = {frame[i].real() * scale_, frame[i].imag() * scale_};
    for (int k = 0; k < 2; ++k) {
      const double r = std::nearbyint(iq[k]);
      if (!(std::fabs(r) <= kFullScale)) {
        throw DataError("raw writer: sample overflows int16 at frame " + std::to_string(frames_written_));
      }
      buffer_[2 * i + k] = to_little(static_cast<std::int16_t>(r));
    }
  }
  out_.write(reinterpret_cast<const char*>(buffer_.data()),
             static_cast<std::streamsize>(buffer_.size() * sizeof(std::int16_t)));
  if (!out_) throw DataError("raw writer: write failed for " + path_.string());
  ++frames_written_;
}

void RawWriter::close() {
  if (closed_) return;
  closed_ = true;
  out_.close();
  if (!out_) throw DataError("raw writer: close failed for " + path_.string());
  if (frames_written_ != config_.num_frames) {
    throw DataError("raw writer: wrote " + std::to_string(frames_written_) + " frames, config expects " +
                    std::to_string(config_.num_frames));
  }
  write_sidecar(path_, {config_.num_frames, config_.num_rx, config_.chirps_per_frame,
                        config_.samples_per_chirp, scale_, config_hash(config_)});
}

RawReader::RawReader(const std::filesystem::path& path, const RadarConfig& config)
    : config_(config) {
  config_.validate();
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw DataError("cannot stat raw file " + path.string() + ": " + ec.message());
  const std::uint64_t want = raw_byte_length(config_);
  if (size != want) {
    throw DimensionError("raw file " + path.string() + " has " + std::to_string(size) +
                         " bytes, config expects " + std::to_string(want));
  }
  header_ = read_sidecar(path);
  if (header_.frames != config_.num_frames || header_.rx != config_.num_rx ||
      header_.chirps != config_.chirps_per_frame || header_.samples != config_.samples_per_chirp) {
    throw DimensionError("sidecar dimensions of " + path.string() + " disagree with the config");
  }
  hash_matches_ = header_.config_hash == config_hash(config_);
  in_.open(path, std::ios::binary);
  if (!in_) throw DataError("cannot open " + path.string());
  buffer_.resize(frame_values(config_));
}

bool RawReader::read_frame(std::span<Complex> out) {
  if (next_frame_ >= config_.num_frames) return false;
  if (out.size() * 2 != buffer_.size()) throw DimensionError("raw reader: frame span has wrong size");
  in_.read(reinterpret_cast<char*>(buffer_.data()),
           static_cast<std::streamsize>(buffer_.size() * sizeof(std::int16_t)));
  if (!in_) throw DataError("raw reader: short read at frame " + std::to_string(next_frame_));
  const double inv = 1.0 / header_.scale;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = {static_cast<double>(to_little(buffer_[2 * i])) * inv,
              static_cast<double>(to_little(buffer_[2 * i + 1])) * inv};
  }
  ++next_frame_;
  return true;
}

void write_raw(const DataCube& cube, const std::filesystem::path& path) {
  validate_cube(cube);
  RawWriter writer(path, cube.config(), raw_scale_for(max_abs_component(cube.data())));
  for (std::size_t f = 0; f < cube.frames(); ++f) writer.write_frame(cube.frame(f));
  writer.close();
}

DataCube read_raw(const std::filesystem::path& path, const RadarConfig& config) {
  RawReader reader(path, config);
  DataCube cube(config);
  for (std::size_t f = 0; f < config.num_frames; ++f) reader.read_frame(cube.frame(f));
  return cube;
}

}  // namespace mdv::sim
