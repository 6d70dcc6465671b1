#include "mdv/rd/range_doppler.hpp"

#include <algorithm>
#include <fstream>

#include "mdv/dsp/fft.hpp"
#include "mdv/dsp/window.hpp"
#include "mdv/simd/kernels.hpp"

namespace mdv::rd {

RangeDopplerProcessor::RangeDopplerProcessor(const RadarConfig& config)
    : config_(config),
      range_window_(dsp::hanning(config.samples_per_chirp)),
      doppler_window_(dsp::hanning(config.chirps_per_frame)) {
  config_.validate();
}

void RangeDopplerProcessor::range_fft(std::span<const Complex> frame, RangeProfileFrame& out) const {
  const std::size_t rx = config_.num_rx, chirps = config_.chirps_per_frame,
                    ns = config_.samples_per_chirp, nfft = config_.range_fft_size;
  if (frame.size() != rx * chirps * ns) throw DimensionError("range_fft: frame has wrong size");
  out.rx = rx;
  out.chirps = chirps;
  out.range_bins = nfft;
  out.data.resize(rx * chirps * nfft);

  const auto& k = simd::kernels();
  const dsp::FftPlan& plan = dsp::fft_plan(nfft);
  for (std::size_t row = 0; row < rx * chirps; ++row) {
    Complex* dst = out.data.data() + row * nfft;
    std::copy_n(frame.data() + row * ns, ns, dst);
    std::fill(dst + ns, dst + nfft, Complex{});
    k.mul_real_window(dst, range_window_.data(), ns);
    plan.forward({dst, nfft});
  }
}

void RangeDopplerProcessor::doppler_fft(const RangeProfileFrame& p, RangeDopplerFrame& out) const {
  const std::size_t chirps = p.chirps, nr = p.range_bins;
  if (chirps != config_.chirps_per_frame) throw DimensionError("doppler_fft: chirp count mismatch");
  out.rx = p.rx;
  out.doppler_bins = chirps;
  out.range_bins = nr;
  out.data.resize(p.data.size());

  const auto& k = simd::kernels();
  const dsp::FftPlan& plan = dsp::fft_plan(chirps);
  const std::size_t block = chirps * nr;
  for (std::size_t r = 0; r < p.rx; ++r) {
    Complex* dst = out.data.data() + r * block;
    const Complex* src = p.data.data() + r * block;
    std::copy_n(src, block, dst);
    for (std::size_t c = 0; c < chirps; ++c) k.scale_real(dst + c * nr, doppler_window_[c], nr);
    plan.forward_columns({dst, block}, nr);
    // fftshift along Doppler: rows move as whole range lines.
    std::rotate(dst, dst + (chirps - chirps / 2) * nr, dst + block);
  }
}

void RangeDopplerProcessor::process(std::span<const Complex> frame, RangeProfileFrame& scratch,
                                    RangeDopplerFrame& out) const {
  range_fft(frame, scratch);
  doppler_fft(scratch, out);
}

RangeDopplerFrame RangeDopplerProcessor::process(std::span<const Complex> frame) const {
  RangeProfileFrame scratch;
  RangeDopplerFrame out;
  process(frame, scratch, out);
  return out;
}

RangeProfileStack range_fft(const DataCube& cube) {
  validate_cube(cube);
  RangeDopplerProcessor proc(cube.config());
  RangeProfileStack stack;
  stack.frames.resize(cube.frames());
  for (std::size_t f = 0; f < cube.frames(); ++f) proc.range_fft(cube.frame(f), stack.frames[f]);
  return stack;
}

RangeDopplerStack doppler_fft(const RangeProfileStack& profiles, const RadarConfig& config) {
  RangeDopplerProcessor proc(config);
  RangeDopplerStack stack;
  stack.slow_time_rate_hz = 1.0 / config.frame_time_s;
  stack.frames.resize(profiles.frames.size());
  for (std::size_t f = 0; f < profiles.frames.size(); ++f) proc.doppler_fft(profiles.frames[f], stack.frames[f]);
  return stack;
}

RangeDopplerStack range_doppler(const DataCube& cube) {
  validate_cube(cube);
  RangeDopplerProcessor proc(cube.config());
  RangeDopplerStack stack;
  stack.slow_time_rate_hz = 1.0 / cube.config().frame_time_s;
  stack.frames.resize(cube.frames());
  RangeProfileFrame scratch;
  for (std::size_t f = 0; f < cube.frames(); ++f) proc.process(cube.frame(f), scratch, stack.frames[f]);
  return stack;
}

void write_magnitude_csv(const RangeDopplerFrame& frame, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(10);
  for (std::size_t d = 0; d < frame.doppler_bins; ++d) {
    for (std::size_t k = 0; k < frame.range_bins; ++k) {
      double p = 0.0;
      for (std::size_t r = 0; r < frame.rx; ++r) p += std::norm(frame.at(r, d, k));
      out << (k ? "," : "") << p;
    }
    out << "\n";
  }
}

void write_range_profile_csv(const RangeProfileFrame& profiles, double spacing,
                             const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(10);
  out << "range_bin,range_m,power\n";
  for (std::size_t k = 0; k < profiles.range_bins; ++k) {
    double p = 0.0;
    for (std::size_t r = 0; r < profiles.rx; ++r) p += std::norm(profiles.at(r, 0, k));
    out << k << "," << static_cast<double>(k) * spacing << "," << p << "\n";
  }
}

}  // namespace mdv::rd
