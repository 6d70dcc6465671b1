#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mdv/dsp/window.hpp"
#include "mdv/rd/range_doppler.hpp"
#include "mdv/sim/scene.hpp"

using namespace mdv;

namespace {

RadarConfig one_frame() {
  RadarConfig c;
  c.num_frames = 1;
  return c;
}

std::size_t argmax_norm(std::span<const Complex> x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (std::norm(x[i]) > std::norm(x[best])) best = i;
  }
  return best;
}

}  // namespace

TEST_CASE("constant input puts the window sum in bin 0") {
  const RadarConfig c = one_frame();
  DataCube cube(c);
  for (auto& z : cube.data()) z = 1.0;
  const auto p = rd::range_fft(cube).frames.at(0);
  const auto w = dsp::hanning(c.samples_per_chirp);
  double sum = 0.0;
  for (double v : w) sum += v;
  CHECK(p.at(0, 0, 0).real() == doctest::Approx(sum));
  CHECK(std::fabs(p.at(0, 0, 0).imag()) < 1e-9);
}

TEST_CASE("tone lands in the bin its frequency maps to") {
  const RadarConfig c = one_frame();
  for (double cycles_per_sample : {10.0 / 256.0, 37.0 / 256.0, 0.3}) {
    DataCube cube(c);
    for (std::size_t n = 0; n < c.samples_per_chirp; ++n) {
      cube.at(0, 0, 0, n) = std::polar(1.0, 2.0 * std::numbers::pi * cycles_per_sample * static_cast<double>(n));
    }
    const auto p = rd::range_fft(cube).frames.at(0);
    std::span<const Complex> row(&p.at(0, 0, 0), c.range_fft_size);
    CHECK(argmax_norm(row) == static_cast<std::size_t>(std::lround(cycles_per_sample * c.range_fft_size)));
  }
}

TEST_CASE("range FFT satisfies Parseval") {
  const RadarConfig c = one_frame();
  DataCube cube(c);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (auto& z : cube.data()) z = Complex(g(rng), g(rng));
  const auto p = rd::range_fft(cube).frames.at(0);
  const auto w = dsp::hanning(c.samples_per_chirp);
  for (std::size_t r = 0; r < c.num_rx; ++r) {
    double time = 0.0, freq = 0.0;
    for (std::size_t n = 0; n < c.samples_per_chirp; ++n) time += std::norm(cube.at(0, r, 5, n) * w[n]);
    for (std::size_t k = 0; k < c.range_fft_size; ++k) freq += std::norm(p.at(r, 5, k));
    CHECK(time == doctest::Approx(freq / static_cast<double>(c.range_fft_size)).epsilon(1e-10));
  }
}

TEST_CASE("chirp-constant input peaks at centre Doppler") {
  const RadarConfig c = one_frame();
  DataCube cube(c);
  for (std::size_t r = 0; r < c.num_rx; ++r) {
    for (std::size_t ch = 0; ch < c.chirps_per_frame; ++ch) cube.at(0, r, ch, c.samples_per_chirp / 2) = 1.0;
  }
  const auto m = rd::range_doppler(cube).frames.at(0);
  CHECK(m.zero_doppler() == 32);
  std::vector<Complex> col(m.doppler_bins);
  for (std::size_t d = 0; d < m.doppler_bins; ++d) col[d] = m.at(0, d, 0);
  CHECK(argmax_norm(col) == 32);
}

TEST_CASE("one cycle of phase per frame moves the peak up one Doppler bin") {
  const RadarConfig c = one_frame();
  DataCube cube(c);
  for (std::size_t ch = 0; ch < c.chirps_per_frame; ++ch) {
    cube.at(0, 0, ch, c.samples_per_chirp / 2) = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(ch) / static_cast<double>(c.chirps_per_frame));
  }
  const auto m = rd::range_doppler(cube).frames.at(0);
  std::vector<Complex> col(m.doppler_bins);
  for (std::size_t d = 0; d < m.doppler_bins; ++d) col[d] = m.at(0, d, 0);
  CHECK(argmax_norm(col) == 33);
}

TEST_CASE("fftshift is an energy-preserving permutation") {
  std::vector<double> x{0, 1, 2, 3, 4, 5, 6, 7};
  auto y = x;
  rd::fftshift(std::span<double>(y));
  CHECK(y == std::vector<double>{4, 5, 6, 7, 0, 1, 2, 3});
  std::vector<double> odd{0, 1, 2, 3, 4};
  rd::fftshift(std::span<double>(odd));
  CHECK(odd == std::vector<double>{3, 4, 0, 1, 2});
}

TEST_CASE("range-Doppler map is linear in the cube") {
  RadarConfig c = one_frame();
  c.chirps_per_frame = 16;
  DataCube a(c), b(c), mix(c);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    a.data()[i] = Complex(g(rng), g(rng));
    b.data()[i] = Complex(g(rng), g(rng));
    mix.data()[i] = 2.0 * a.data()[i] + Complex(0.0, 1.0) * b.data()[i];
  }
  const auto ma = rd::range_doppler(a).frames[0], mb = rd::range_doppler(b).frames[0], mm = rd::range_doppler(mix).frames[0];
  double err = 0.0, mag = 0.0;
  for (std::size_t i = 0; i < mm.data.size(); ++i) {
    err = std::max(err, std::abs(mm.data[i] - (2.0 * ma.data[i] + Complex(0.0, 1.0) * mb.data[i])));
    mag = std::max(mag, std::abs(mm.data[i]));
  }
  CHECK(err <= 1e-12 * mag);
}

TEST_CASE("static simulated target sits at centre Doppler and its range bin") {
  RadarConfig c;
  c.num_frames = 5;
  sim::SceneSpec scene;
  sim::SubjectSpec s;
  s.range_m = 3.0;
  s.angle_deg = 15.0;
  s.resp_displacement_m = 0.0;
  s.heart_displacement_m = 0.0;
  scene.subjects = {s};
  const auto stack = rd::range_doppler(sim::simulate(scene, c));
  const auto expected = static_cast<std::size_t>(std::lround(3.0 / derive_quantities(c).range_bin_spacing_m));
  for (const auto& m : stack.frames) {
    std::vector<Complex> ant0(m.data.begin(), m.data.begin() + static_cast<std::ptrdiff_t>(m.cells()));
    const std::size_t idx = argmax_norm(ant0);
    CHECK(idx / m.range_bins == m.zero_doppler());
    CHECK(idx % m.range_bins == expected);
  }
  CHECK(stack.slow_time_rate_hz == doctest::Approx(100.0));
}

TEST_CASE("streaming processor matches the batch transform") {
  RadarConfig c;
  c.num_frames = 2;
  sim::SceneSpec scene;
  scene.subjects = {sim::SubjectSpec{}};
  scene.noise_stddev = 0.01;
  const DataCube cube = sim::simulate(scene, c);
  const auto batch = rd::range_doppler(cube);
  rd::RangeDopplerProcessor proc(c);
  const auto single = proc.process(cube.frame(1));
  CHECK(single.data == batch.frames[1].data);
}
