#include "mdv/dsp/spectral.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "mdv/dsp/fft.hpp"
#include "mdv/dsp/window.hpp"

namespace mdv::dsp {

PsdEstimate welch_psd(const SlowTimeSeries& x, const WelchOptions& options) {
  const double fs = x.sample_rate_hz;
  if (!(fs > 0.0)) throw std::invalid_argument("welch_psd: sample rate must be > 0");
  std::size_t seg = options.segment_length;
  if (seg == 0) seg = static_cast<std::size_t>(std::llround(30.0 * fs));
  if (seg < 2) throw std::invalid_argument("welch_psd: segment length must be >= 2");
  if (!(options.overlap >= 0.0 && options.overlap < 1.0)) {
    throw std::invalid_argument("welch_psd: overlap must lie in [0, 1)");
  }
  if (x.size() < seg) {
    throw std::invalid_argument("welch_psd: signal of " + std::to_string(x.size()) +
                                " samples is shorter than one segment of " + std::to_string(seg));
  }
  const std::size_t nfft = options.nfft == 0 ? std::bit_ceil(seg) : options.nfft;
  if (nfft < seg) throw std::invalid_argument("welch_psd: nfft must be >= segment length");
  const std::size_t step =
      seg - static_cast<std::size_t>(std::llround(options.overlap * static_cast<double>(seg)));
  const std::size_t count = 1 + (x.size() - seg) / step;

  const std::vector<double> w = hanning(seg);
  double wsum2 = 0.0;
  for (double v : w) wsum2 += v * v;

  const std::size_t bins = nfft / 2 + 1;
  PsdEstimate out;
  out.segment_length = seg;
  out.overlap = options.overlap;
  out.num_segments = count;
  out.power.assign(bins, 0.0);
  out.freqs_hz.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out.freqs_hz[k] = static_cast<double>(k) * fs / static_cast<double>(nfft);
  }

  const FftPlan& plan = fft_plan(nfft);
  std::vector<cplx> buf(nfft);
  for (std::size_t s = 0; s < count; ++s) {
    const double* seg_begin = x.values.data() + s * step;
    double mean = 0.0;
    for (std::size_t i = 0; i < seg; ++i) mean += seg_begin[i];
    mean /= static_cast<double>(seg);
    std::fill(buf.begin(), buf.end(), cplx{});
    for (std::size_t i = 0; i < seg; ++i) buf[i] = (seg_begin[i] - mean) * w[i];
    plan.forward(buf);
    for (std::size_t k = 0; k < bins; ++k) out.power[k] += std::norm(buf[k]);
  }
  const double scale = 1.0 / (fs * wsum2 * static_cast<double>(count));
  for (std::size_t k = 0; k < bins; ++k) {
    const bool edge = k == 0 || (nfft % 2 == 0 && k == bins - 1);
    out.power[k] *= scale * (edge ? 1.0 : 2.0);
  }
  return out;
}

double spectral_entropy(const PsdEstimate& psd, const Band& band) {
  double total = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < psd.freqs_hz.size(); ++k) {
    if (!band.contains(psd.freqs_hz[k])) continue;
    total += psd.power[k];
    ++n;
  }
  if (n == 0) throw std::invalid_argument("spectral_entropy: no PSD bins inside the band");
  if (!(total > 0.0)) return 1.0;
  if (n == 1) return 0.0;
  double h = 0.0;
  for (std::size_t k = 0; k < psd.freqs_hz.size(); ++k) {
    if (!band.contains(psd.freqs_hz[k])) continue;
    const double p = psd.power[k] / total;
    if (p > 0.0) h -= p * std::log(p);
  }
  return h / std::log(static_cast<double>(n));
}

}  // namespace mdv::dsp
