#include "mdv/dsp/wavelet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mdv::dsp {

namespace {

constexpr std::size_t kTaps = 8;

// db4 decomposition low-pass.
constexpr std::array<double, kTaps> kLo = {
    -0.010597401785069032, 0.0328830116668852,  0.030841381835560764, -0.18703481171909309,
    -0.027983769416859854, 0.6308807679298589,  0.7148465705529157,   0.2303778133088965};

// Quadrature mirror: hi[j] = (-1)^j lo[7 - j].
constexpr std::array<double, kTaps> make_hi() {
  std::array<double, kTaps> hi{};
  for (std::size_t j = 0; j < kTaps; ++j) hi[j] = (j % 2 == 0 ? 1.0 : -1.0) * kLo[kTaps - 1 - j];
  return hi;
}
constexpr std::array<double, kTaps> kHi = make_hi();

// Half-sample symmetric extension: ... x1 x0 | x0 x1 ... x{n-1} | x{n-1} x{n-2} ...
std::size_t sym_index(long long i, std::size_t n) {
  const long long period = 2 * static_cast<long long>(n);
  long long m = i % period;
  if (m < 0) m += period;
  return m < static_cast<long long>(n) ? static_cast<std::size_t>(m)
                                       : static_cast<std::size_t>(period - 1 - m);
}

void analyze(std::span<const double> x, std::vector<double>& approx, std::vector<double>& detail) {
  const std::size_t n = x.size();
  const std::size_t out = (n + kTaps - 1) / 2;
  approx.assign(out, 0.0);
  detail.assign(out, 0.0);
  for (std::size_t k = 0; k < out; ++k) {
    const long long centre = 2 * static_cast<long long>(k) + 1;
    double a = 0.0, d = 0.0;
    for (std::size_t j = 0; j < kTaps; ++j) {
      const double v = x[sym_index(centre - static_cast<long long>(j), n)];
      a += kLo[j] * v;
      d += kHi[j] * v;
    }
    approx[k] = a;
    detail[k] = d;
  }
}

// Transpose of analyze, evaluated only on the original support.
std::vector<double> synthesize(std::span<const double> approx, std::span<const double> detail,
                               std::size_t n) {
  std::vector<double> x(n, 0.0);
  const long long count = static_cast<long long>(approx.size());
  for (std::size_t m = 0; m < n; ++m) {
    const long long mm = static_cast<long long>(m);
    // taps j = 2k + 1 - m must lie in [0, 7]
    const long long k_lo = mm / 2;
    const long long k_hi = std::min<long long>((mm + static_cast<long long>(kTaps) - 2) / 2, count - 1);
    double acc = 0.0;
    for (long long k = k_lo; k <= k_hi; ++k) {
      const long long j = 2 * k + 1 - mm;
      if (j < 0 || j >= static_cast<long long>(kTaps)) continue;
      acc += approx[k] * kLo[j] + detail[k] * kHi[j];
    }
    x[m] = acc;
  }
  return x;
}

double median_abs(std::vector<double> v) {
  for (double& e : v) e = std::fabs(e);
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2 == 1) return v[mid];
  const double upper = v[mid];
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

WaveletDecomposition wavedec_db4(std::span<const double> x, std::size_t levels) {
  if (levels == 0) throw std::invalid_argument("wavedec_db4: levels must be >= 1");
  if (x.size() < (std::size_t{1} << levels)) {
    throw std::invalid_argument("wavedec_db4: signal of length " + std::to_string(x.size()) +
                                " is too short for " + std::to_string(levels) + " levels");
  }
  WaveletDecomposition dec;
  dec.lengths.push_back(x.size());
  std::vector<double> current(x.begin(), x.end());
  for (std::size_t level = 0; level < levels; ++level) {
    std::vector<double> a, d;
    analyze(current, a, d);
    dec.details.push_back(std::move(d));
    current = std::move(a);
    dec.lengths.push_back(current.size());
  }
  dec.approx = std::move(current);
  return dec;
}

std::vector<double> waverec_db4(const WaveletDecomposition& dec) {
  std::vector<double> current = dec.approx;
  for (std::size_t level = dec.details.size(); level-- > 0;) {
    current = synthesize(current, dec.details[level], dec.lengths[level]);
  }
  return current;
}

double soft_threshold(double w, double t) {
  const double mag = std::fabs(w) - t;
  if (mag <= 0.0) return 0.0;
  return std::copysign(mag, w);
}

std::vector<double> dwt_denoise(std::span<const double> x, const WaveletDenoiseOptions& options) {
  WaveletDecomposition dec = wavedec_db4(x, options.levels);
  double threshold = 0.0;
  if (options.threshold) {
    threshold = *options.threshold;
    if (threshold < 0.0) throw std::invalid_argument("dwt_denoise: threshold must be >= 0");
  } else {
    const double sigma = median_abs(dec.details.front()) / 0.6745;
    threshold = sigma * std::sqrt(2.0 * std::log(static_cast<double>(x.size())));
  }
  for (auto& level : dec.details) {
    for (double& w : level) w = soft_threshold(w, threshold);
  }
  return waverec_db4(dec);
}

SlowTimeSeries dwt_denoise(const SlowTimeSeries& x, const WaveletDenoiseOptions& options) {
  return {dwt_denoise(std::span<const double>(x.values), options), x.sample_rate_hz};
}

}  // namespace mdv::dsp
