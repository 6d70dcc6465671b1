#include "mdv/vitals/vitals.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

namespace mdv::vitals {

namespace {

dsp::Band adaptive_band(const SpectralPeak& peak, double half_width, const dsp::Band& limits) {
  if (!peak.valid) return limits;
  return {std::max(limits.low_hz, peak.freq_hz - half_width), std::min(limits.high_hz, peak.freq_hz + half_width)};
}

double stddev(std::span<const double> x) {
  if (x.empty()) return 0.0;
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return std::sqrt(s / static_cast<double>(x.size()));
}

BandEstimate estimate_band(const FusionResult& fused, const dsp::Band& band, const dsp::Band& limits,
                           const VitalsConfig& cfg) {
  BandEstimate est;
  est.band = band;
  est.weights = fused.weights;
  const dsp::PsdEstimate psd = dsp::welch_psd(fused.signal, cfg.welch);
  est.entropy = dsp::spectral_entropy(psd, band);
  const SpectralPeak peak = spectral_peak(psd, band, cfg.min_prominence_db);
  if (peak.valid) {
    est.freq_hz = peak.freq_hz;
    est.method = EstimationMethod::spectral;
  } else if (auto bpm = time_domain_rate(fused.signal, band)) {
    est.freq_hz = *bpm / 60.0;
    est.method = EstimationMethod::time_domain;
  }
  if (est.method != EstimationMethod::invalid && limits.contains(est.freq_hz)) {
    est.valid = true;
    est.rate_bpm = 60.0 * est.freq_hz;
  } else {
    est.method = EstimationMethod::invalid;
    est.rate_bpm = std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

nlohmann::ordered_json band_json(const BandEstimate& b) {
  nlohmann::ordered_json j;
  j["rate_bpm"] = b.valid ? nlohmann::ordered_json(b.rate_bpm) : nlohmann::ordered_json(nullptr);
  j["freq_hz"] = b.valid ? nlohmann::ordered_json(b.freq_hz) : nlohmann::ordered_json(nullptr);
  j["valid"] = b.valid;
  j["estimation_method"] = to_string(b.method);
  j["band_hz"] = {b.band.low_hz, b.band.high_hz};
  j["spectral_entropy"] = b.entropy;
  j["method_weights"] = {{"standard", b.weights.size() > 0 ? b.weights[0] : 0.0},
                         {"wavelet_enhanced", b.weights.size() > 1 ? b.weights[1] : 0.0}};
  return j;
}

}  // namespace

SpectralPeak spectral_peak(const dsp::PsdEstimate& psd, const dsp::Band& band, double min_prominence_db) {
  const std::size_t n = psd.power.size();
  std::vector<double> in_band;
  std::size_t best = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (!band.contains(psd.freqs_hz[k])) continue;
    const double v = psd.power[k];
    in_band.push_back(v);
    if (best == n || v > psd.power[best]) best = k;
  }
  if (best == n) throw std::invalid_argument("spectral_peak: no PSD bin inside the band");

  SpectralPeak out;
  out.freq_hz = psd.freqs_hz[best];
  const double peak = psd.power[best];
  const auto mid = in_band.begin() + static_cast<std::ptrdiff_t>(in_band.size() / 2);
  std::nth_element(in_band.begin(), mid, in_band.end());
  const double median = *mid;
  out.prominence_db = median > 0.0 ? 10.0 * std::log10(peak / median)
                                   : (peak > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);

  const double left = best > 0 ? psd.power[best - 1] : -1.0;
  const double right = best + 1 < n ? psd.power[best + 1] : -1.0;
  const bool local_max = peak > 0.0 && peak > left && peak >= right;
  out.valid = local_max && out.prominence_db >= min_prominence_db;

  if (left > 0.0 && right > 0.0 && peak > 0.0) {
    const double yl = std::log(left), y0 = std::log(peak), yr = std::log(right);
    const double den = yl - 2.0 * y0 + yr;
    if (den < 0.0) {
      const double off = std::clamp(0.5 * (yl - yr) / den, -0.5, 0.5);
      out.freq_hz += off * psd.bin_width_hz();
    }
  }
  out.freq_hz = std::clamp(out.freq_hz, band.low_hz, band.high_hz);
  return out;
}

std::vector<std::size_t> find_peaks(std::span<const double> x, std::size_t min_distance, double min_prominence) {
  const std::size_t n = x.size();
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < n;) {
    if (x[i] > x[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && x[j + 1] == x[i]) ++j;
      if (j + 1 < n && x[j + 1] < x[i]) {
        peaks.push_back((i + j) / 2);
        i = j + 1;
        continue;
      }
      i = j + 1;
      continue;
    }
    ++i;
  }

  if (min_distance > 1 && peaks.size() > 1) {
    std::vector<std::size_t> order(peaks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[peaks[a]] > x[peaks[b]]; });
    std::vector<char> keep(peaks.size(), 1);
    for (std::size_t idx : order) {
      if (!keep[idx]) continue;
      for (std::size_t j = idx; j-- > 0 && peaks[idx] - peaks[j] < min_distance;) keep[j] = 0;
      for (std::size_t j = idx + 1; j < peaks.size() && peaks[j] - peaks[idx] < min_distance; ++j) keep[j] = 0;
    }
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < peaks.size(); ++i) {
      if (keep[i]) kept.push_back(peaks[i]);
    }
    peaks.swap(kept);
  }

  std::vector<std::size_t> out;
  for (std::size_t p : peaks) {
    // Lowest point on each side before reaching higher ground.
    double left_min = x[p];
    for (std::size_t i = p; i-- > 0;) {
      if (x[i] > x[p]) break;
      left_min = std::min(left_min, x[i]);
    }
    double right_min = x[p];
    for (std::size_t i = p + 1; i < n; ++i) {
      if (x[i] > x[p]) break;
      right_min = std::min(right_min, x[i]);
    }
    if (x[p] - std::max(left_min, right_min) >= min_prominence) out.push_back(p);
  }
  return out;
}

std::optional<double> time_domain_rate(const SlowTimeSeries& x, const dsp::Band& band) {
  if (!(x.sample_rate_hz > 0.0) || !(band.high_hz > 0.0)) throw std::invalid_argument("time_domain_rate: bad rate or band");
  const double sd = stddev(x.values);
  if (!(sd > 0.0)) return std::nullopt;
  const auto distance = static_cast<std::size_t>(std::ceil(0.5 / band.high_hz * x.sample_rate_hz));
  const auto peaks = find_peaks(x.values, std::max<std::size_t>(distance, 1), 0.3 * sd);
  if (peaks.size() < 3) return std::nullopt;
  const double span_s = static_cast<double>(peaks.back() - peaks.front()) / x.sample_rate_hz;
  return 60.0 * static_cast<double>(peaks.size() - 1) / span_s;
}

FusionResult fuse(std::span<const SlowTimeSeries> signals, const dsp::Band& band, const dsp::WelchOptions& welch) {
  if (signals.empty()) throw std::invalid_argument("fuse: no signals");
  const std::size_t n = signals.front().size();
  for (const auto& s : signals) {
    if (s.size() != n) throw std::invalid_argument("fuse: signals differ in length");
  }
  FusionResult out;
  double total = 0.0;
  for (const auto& s : signals) {
    const double h = dsp::spectral_entropy(dsp::welch_psd(s, welch), band);
    out.entropies.push_back(h);
    out.weights.push_back(1.0 / (h + 1e-6));
    total += out.weights.back();
  }
  for (double& w : out.weights) w /= total;
  out.signal = {std::vector<double>(n, 0.0), signals.front().sample_rate_hz};
  for (std::size_t i = 0; i < signals.size(); ++i) {
    for (std::size_t k = 0; k < n; ++k) out.signal.values[k] += out.weights[i] * signals[i].values[k];
  }
  return out;
}

const char* to_string(EstimationMethod m) {
  switch (m) {
    case EstimationMethod::spectral: return "spectral";
    case EstimationMethod::time_domain: return "time_domain";
    case EstimationMethod::invalid: return "invalid";
  }
  return "invalid";
}

VitalsReport extract_vitals(const SlowTimeSeries& x, const VitalsConfig& cfg) {
  const double fs = x.sample_rate_hz;
  if (!(fs > 0.0)) throw std::invalid_argument("extract_vitals: sample rate must be > 0");
  const std::size_t segment =
      cfg.welch.segment_length ? cfg.welch.segment_length : static_cast<std::size_t>(std::llround(30.0 * fs));
  if (x.size() < segment) {
    throw std::invalid_argument("extract_vitals: need at least " + std::to_string(segment) + " samples, got " +
                                std::to_string(x.size()));
  }

  VitalsReport rep;
  rep.raw = x;
  SlowTimeSeries centred = x;
  const double mean = std::accumulate(x.values.begin(), x.values.end(), 0.0) / static_cast<double>(x.size());
  for (double& v : centred.values) v -= mean;

  rep.denoised = dsp::dwt_denoise(centred, cfg.wavelet);
  const SlowTimeSeries band = dsp::butter_bandpass_filtfilt(rep.denoised, cfg.bandpass);
  rep.smoothed = dsp::savitzky_golay(dsp::median_filter(band, cfg.median_kernel), cfg.savgol_window, cfg.savgol_order);

  const dsp::PsdEstimate psd = dsp::welch_psd(rep.smoothed, cfg.welch);
  const SpectralPeak resp0 = spectral_peak(psd, cfg.respiration_band, cfg.min_prominence_db);

  // The heart peak is located after the comb so respiration harmonics
  // cannot steer the adaptive cardiac band.
  const SlowTimeSeries heart_in =
      cfg.heart_comb && resp0.valid ? dsp::comb_notch(rep.smoothed, resp0.freq_hz) : rep.smoothed;
  const SpectralPeak heart0 = spectral_peak(dsp::welch_psd(heart_in, cfg.welch), cfg.cardiac_band, cfg.min_prominence_db);

  const dsp::Band resp_band = adaptive_band(resp0, cfg.respiration_half_width_hz, cfg.respiration_band);
  const dsp::Band heart_band = adaptive_band(heart0, cfg.cardiac_half_width_hz, cfg.cardiac_band);

  auto branch = [&](const SlowTimeSeries& in, const dsp::Band& b) {
    const SlowTimeSeries standard = dsp::butter_bandpass_filtfilt(in, {b.low_hz, b.high_hz, cfg.bandpass.order});
    const SlowTimeSeries enhanced = dsp::dwt_denoise(standard, cfg.wavelet);
    const SlowTimeSeries variants[] = {standard, enhanced};
    return fuse(variants, b, cfg.welch);
  };
  const FusionResult resp = branch(rep.smoothed, resp_band);
  const FusionResult heart = branch(heart_in, heart_band);

  rep.respiration = estimate_band(resp, resp_band, cfg.respiration_band, cfg);
  rep.heart = estimate_band(heart, heart_band, cfg.cardiac_band, cfg);
  rep.respiration_signal = resp.signal;
  rep.heart_signal = heart.signal;
  return rep;
}

std::string report_to_json(const VitalsReport& r) {
  nlohmann::ordered_json j;
  j["trajectory_id"] = r.trajectory_id;
  j["source"] = r.source;
  j["range_m"] = r.range_m;
  j["angle_deg"] = r.angle_deg;
  j["first_frame"] = r.first_frame;
  j["duration_s"] = r.raw.duration_s();
  j["respiration_bpm"] = r.respiration.valid ? nlohmann::ordered_json(r.respiration.rate_bpm) : nlohmann::ordered_json(nullptr);
  j["heart_bpm"] = r.heart.valid ? nlohmann::ordered_json(r.heart.rate_bpm) : nlohmann::ordered_json(nullptr);
  j["respiration"] = band_json(r.respiration);
  j["heart"] = band_json(r.heart);
  return j.dump(2);
}

void write_intermediate_csv(const VitalsReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out.precision(10);
  out << "time_s,raw_energy,denoised,respiration,heart\n";
  const std::size_t n = r.raw.size();
  auto at = [](const SlowTimeSeries& s, std::size_t i) { return i < s.size() ? s.values[i] : 0.0; };
  for (std::size_t i = 0; i < n; ++i) {
    out << static_cast<double>(i) / r.raw.sample_rate_hz << "," << r.raw.values[i] << "," << at(r.denoised, i) << ","
        << at(r.respiration_signal, i) << "," << at(r.heart_signal, i) << "\n";
  }
}

}  // namespace mdv::vitals
