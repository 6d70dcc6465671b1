#include "mdv/dsp/filter.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace mdv::dsp {

namespace {

using cplx = std::complex<double>;

void require_series(const SlowTimeSeries& x) {
  if (!(x.sample_rate_hz > 0.0)) throw std::invalid_argument("series sample rate must be > 0");
}

cplx section_response(const Biquad& s, cplx zinv) {
  const cplx num = s.b0 + zinv * (s.b1 + zinv * s.b2);
  const cplx den = 1.0 + zinv * (s.a1 + zinv * s.a2);
  return num / den;
}

// Solve the small dense system a * u = rhs (row-major, n x n) in place.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r * n + col]) > std::fabs(a[pivot * n + col])) pivot = r;
    }
    if (a[pivot * n + col] == 0.0) throw std::invalid_argument("singular least-squares system");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(rhs[col], rhs[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> u(n);
  for (std::size_t r = n; r-- > 0;) {
    double acc = rhs[r];
    for (std::size_t c = r + 1; c < n; ++c) acc -= a[r * n + c] * u[c];
    u[r] = acc / a[r * n + r];
  }
  return u;
}

// Weights w such that sum_i w[i] * y[i] is the least-squares polynomial of
// the given order through samples at positions i - half, evaluated at `at`.
std::vector<double> polyfit_weights(std::size_t window, std::size_t order, double at) {
  const std::size_t terms = order + 1;
  const double half = static_cast<double>(window / 2);
  std::vector<double> gram(terms * terms, 0.0);
  for (std::size_t i = 0; i < window; ++i) {
    const double t = static_cast<double>(i) - half;
    for (std::size_t r = 0; r < terms; ++r) {
      for (std::size_t c = 0; c < terms; ++c) {
        gram[r * terms + c] += std::pow(t, static_cast<double>(r + c));
      }
    }
  }
  std::vector<double> rhs(terms);
  for (std::size_t k = 0; k < terms; ++k) rhs[k] = std::pow(at, static_cast<double>(k));
  const std::vector<double> u = solve_dense(std::move(gram), std::move(rhs));
  std::vector<double> w(window, 0.0);
  for (std::size_t i = 0; i < window; ++i) {
    const double t = static_cast<double>(i) - half;
    double acc = 0.0;
    for (std::size_t k = 0; k < terms; ++k) acc += u[k] * std::pow(t, static_cast<double>(k));
    w[i] = acc;
  }
  return w;
}

std::size_t reflect_index(long long i, std::size_t n) {
  if (n == 1) return 0;
  const long long period = 2 * (static_cast<long long>(n) - 1);
  long long m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < static_cast<long long>(n) ? m : period - m);
}

std::size_t symmetric_index(long long i, std::size_t n) {
  const long long period = 2 * static_cast<long long>(n);
  long long m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < static_cast<long long>(n) ? m : period - 1 - m);
}

// Causal M-point running mean; outputs before a full window average what
// is available.
std::vector<double> running_mean(const std::vector<double>& x, std::size_t m) {
  std::vector<double> y(x.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc += x[i];
    if (i >= m) acc -= x[i - m];
    y[i] = acc / static_cast<double>(std::min(i + 1, m));
  }
  return y;
}

}  // namespace

std::vector<Biquad> butter_bandpass(const BandpassSpec& spec, double fs) {
  if (!(fs > 0.0)) throw FilterDesignError("sample rate must be > 0");
  if (spec.order == 0) throw FilterDesignError("filter order must be >= 1");
  if (!(spec.low_hz > 0.0 && spec.low_hz < spec.high_hz && spec.high_hz < fs / 2.0)) {
    throw FilterDesignError("bandpass edges must satisfy 0 < low < high < fs/2 (got " +
                            std::to_string(spec.low_hz) + ", " + std::to_string(spec.high_hz) +
                            " at fs " + std::to_string(fs) + ")");
  }
  const std::size_t n = spec.order;
  const double fs2 = 2.0 * fs;
  const double w_lo = fs2 * std::tan(std::numbers::pi * spec.low_hz / fs);
  const double w_hi = fs2 * std::tan(std::numbers::pi * spec.high_hz / fs);
  const double bw = w_hi - w_lo;
  const double w0 = std::sqrt(w_lo * w_hi);

  std::vector<cplx> upper, real;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx p = std::polar(1.0, std::numbers::pi * static_cast<double>(2 * k + n + 1) /
                                       static_cast<double>(2 * n));
    const cplx half = p * bw / 2.0;
    const cplx disc = std::sqrt(half * half - w0 * w0);
    for (const cplx s : {half + disc, half - disc}) {
      const cplx z = (fs2 + s) / (fs2 - s);
      if (std::abs(z) >= 1.0) throw FilterDesignError("bandpass design produced an unstable pole");
      const double tol = 1e-12 * std::abs(z);
      if (z.imag() > tol) {
        upper.push_back(z);
      } else if (std::fabs(z.imag()) <= tol) {
        real.emplace_back(z.real(), 0.0);
      }
    }
  }
  std::vector<Biquad> sos;
  for (const cplx z : upper) {
    sos.push_back({1.0, 0.0, -1.0, -2.0 * z.real(), std::norm(z)});
  }
  std::sort(real.begin(), real.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
  for (std::size_t i = 0; i + 1 < real.size(); i += 2) {
    const double r1 = real[i].real(), r2 = real[i + 1].real();
    sos.push_back({1.0, 0.0, -1.0, -(r1 + r2), r1 * r2});
  }
  if (sos.size() != n) throw FilterDesignError("bandpass pole pairing failed");

  const double centre_hz = fs / std::numbers::pi * std::atan(w0 / fs2);
  const double g = sos_magnitude(sos, centre_hz, fs);
  if (!(g > 0.0) || !std::isfinite(g)) throw FilterDesignError("bandpass gain normalisation failed");
  sos.front().b0 /= g;
  sos.front().b1 /= g;
  sos.front().b2 /= g;
  return sos;
}

double sos_magnitude(std::span<const Biquad> sos, double freq_hz, double fs) {
  const cplx zinv = std::polar(1.0, -2.0 * std::numbers::pi * freq_hz / fs);
  cplx h = 1.0;
  for (const Biquad& s : sos) h *= section_response(s, zinv);
  return std::abs(h);
}

std::vector<double> sosfilt(std::span<const Biquad> sos, std::span<const double> x,
                            std::span<const double> initial_state) {
  if (!initial_state.empty() && initial_state.size() != 2 * sos.size()) {
    throw std::invalid_argument("sosfilt: initial state needs 2 values per section");
  }
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t s = 0; s < sos.size(); ++s) {
    const Biquad& q = sos[s];
    double z1 = initial_state.empty() ? 0.0 : initial_state[2 * s];
    double z2 = initial_state.empty() ? 0.0 : initial_state[2 * s + 1];
    for (double& v : y) {
      const double in = v;
      const double out = q.b0 * in + z1;
      z1 = q.b1 * in - q.a1 * out + z2;
      z2 = q.b2 * in - q.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> sosfilt_zi(std::span<const Biquad> sos) {
  std::vector<double> zi(2 * sos.size());
  double scale = 1.0;
  for (std::size_t s = 0; s < sos.size(); ++s) {
    const Biquad& q = sos[s];
    const double gain = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    const double z2 = q.b2 - q.a2 * gain;
    const double z1 = q.b1 - q.a1 * gain + z2;
    zi[2 * s] = scale * z1;
    zi[2 * s + 1] = scale * z2;
    scale *= gain;
  }
  return zi;
}

std::vector<double> sosfiltfilt(std::span<const Biquad> sos, std::span<const double> x) {
  const std::size_t pad = 3 * (2 * sos.size() + 1);
  const std::size_t n = x.size();
  if (n <= pad) {
    throw std::invalid_argument("filtfilt needs more than " + std::to_string(pad) +
                                " samples, got " + std::to_string(n));
  }
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  const std::vector<double> zi = sosfilt_zi(sos);
  std::vector<double> state(zi.size());
  for (std::size_t i = 0; i < zi.size(); ++i) state[i] = zi[i] * ext.front();
  std::vector<double> y = sosfilt(sos, ext, state);

  std::reverse(y.begin(), y.end());
  for (std::size_t i = 0; i < zi.size(); ++i) state[i] = zi[i] * y.front();
  y = sosfilt(sos, y, state);
  std::reverse(y.begin(), y.end());

  return {y.begin() + static_cast<std::ptrdiff_t>(pad), y.end() - static_cast<std::ptrdiff_t>(pad)};
}

SlowTimeSeries butter_bandpass_filtfilt(const SlowTimeSeries& x, const BandpassSpec& spec) {
  require_series(x);
  const auto sos = butter_bandpass(spec, x.sample_rate_hz);
  return {sosfiltfilt(sos, x.values), x.sample_rate_hz};
}

std::size_t comb_length(double fs, double f0) {
  if (!(f0 > 0.0 && f0 < fs / 2.0)) {
    throw std::invalid_argument("comb fundamental must lie in (0, fs/2)");
  }
  const auto m = static_cast<std::size_t>(std::llround(fs / f0));
  if (m < 2) throw std::invalid_argument("comb length M = round(fs/f0) must be >= 2");
  return m;
}

double comb_magnitude(std::size_t m, double freq_hz, double fs) {
  const double x = std::numbers::pi * freq_hz / fs;
  const double den = static_cast<double>(m) * std::sin(x);
  if (std::fabs(den) < 1e-300) return 1.0;
  return std::fabs(std::sin(x * static_cast<double>(m)) / den);
}

SlowTimeSeries comb_notch(const SlowTimeSeries& x, double fundamental_hz) {
  require_series(x);
  const std::size_t m = comb_length(x.sample_rate_hz, fundamental_hz);
  const std::size_t n = x.size();
  if (m > n) {
    throw std::invalid_argument("comb length " + std::to_string(m) + " exceeds signal length " +
                                std::to_string(n));
  }
  std::vector<double> ext;
  ext.reserve(n + 2 * m);
  for (long long i = -static_cast<long long>(m); i < static_cast<long long>(n + m); ++i) {
    ext.push_back(x.values[symmetric_index(i, n)]);
  }
  std::vector<double> y = running_mean(ext, m);
  std::reverse(y.begin(), y.end());
  y = running_mean(y, m);
  std::reverse(y.begin(), y.end());
  return {{y.begin() + static_cast<std::ptrdiff_t>(m), y.end() - static_cast<std::ptrdiff_t>(m)},
          x.sample_rate_hz};
}

std::vector<double> median_filter(std::span<const double> x, std::size_t kernel) {
  if (kernel == 0 || kernel % 2 == 0) throw std::invalid_argument("median kernel must be odd");
  const std::size_t n = x.size();
  if (kernel == 1 || n == 0) return {x.begin(), x.end()};
  const long long half = static_cast<long long>(kernel / 2);
  std::vector<double> y(n), win(kernel);
  for (std::size_t i = 0; i < n; ++i) {
    for (long long k = -half; k <= half; ++k) {
      win[static_cast<std::size_t>(k + half)] = x[reflect_index(static_cast<long long>(i) + k, n)];
    }
    std::nth_element(win.begin(), win.begin() + half, win.end());
    y[i] = win[static_cast<std::size_t>(half)];
  }
  return y;
}

SlowTimeSeries median_filter(const SlowTimeSeries& x, std::size_t kernel) {
  return {median_filter(std::span<const double>(x.values), kernel), x.sample_rate_hz};
}

std::vector<double> savgol_coefficients(std::size_t window, std::size_t poly_order) {
  if (window == 0 || window % 2 == 0) throw std::invalid_argument("Savitzky-Golay window must be odd");
  if (poly_order >= window) throw std::invalid_argument("Savitzky-Golay order must be < window");
  return polyfit_weights(window, poly_order, 0.0);
}

std::vector<double> savitzky_golay(std::span<const double> x, std::size_t window,
                                   std::size_t poly_order) {
  const std::vector<double> c = savgol_coefficients(window, poly_order);
  const std::size_t n = x.size();
  if (n < window) {
    throw std::invalid_argument("Savitzky-Golay window " + std::to_string(window) +
                                " longer than signal of " + std::to_string(n));
  }
  const std::size_t half = window / 2;
  std::vector<double> y(n);
  for (std::size_t i = half; i + half < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < window; ++k) acc += c[k] * x[i - half + k];
    y[i] = acc;
  }
  for (std::size_t i = 0; i < half; ++i) {
    const auto head = polyfit_weights(window, poly_order, static_cast<double>(i) - static_cast<double>(half));
    const auto tail = polyfit_weights(window, poly_order, static_cast<double>(half - i));
    double a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < window; ++k) {
      a += head[k] * x[k];
      b += tail[k] * x[n - window + k];
    }
    y[i] = a;
    y[n - 1 - i] = b;
  }
  return y;
}

SlowTimeSeries savitzky_golay(const SlowTimeSeries& x, std::size_t window, std::size_t poly_order) {
  return {savitzky_golay(std::span<const double>(x.values), window, poly_order), x.sample_rate_hz};
}

}  // namespace mdv::dsp
