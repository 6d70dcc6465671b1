#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mdv/core/types.hpp"
#include "mdv/dsp/filter.hpp"
#include "mdv/dsp/spectral.hpp"
#include "mdv/dsp/wavelet.hpp"

namespace mdv::vitals {

struct SpectralPeak {
  double freq_hz = 0.0;
  bool valid = false;
  /// Peak over band median, dB.
  double prominence_db = 0.0;
};

/// Largest in-band bin with 3-point parabolic refinement on log power.
/// Valid when the bin is a local maximum of the whole PSD and stands at
/// least min_prominence_db above the band median. Throws
/// std::invalid_argument when no bin lies in the band.
SpectralPeak spectral_peak(const dsp::PsdEstimate& psd, const dsp::Band& band, double min_prominence_db = 3.0);

/// Sample indices of local maxima at least min_distance apart (taller peaks
/// win) whose topographic prominence is at least min_prominence.
std::vector<std::size_t> find_peaks(std::span<const double> x, std::size_t min_distance, double min_prominence);

/// 60 / mean peak interval, peaks at least 0.5 / band.high_hz s apart with
/// prominence >= 0.3 std(x). Empty when fewer than 3 peaks.
std::optional<double> time_domain_rate(const SlowTimeSeries& x, const dsp::Band& band);

struct FusionResult {
  SlowTimeSeries signal;
  std::vector<double> weights;
  std::vector<double> entropies;
};

/// Convex combination with weights proportional to 1 / (H + 1e-6), H the
/// in-band spectral entropy of each signal's Welch PSD.
FusionResult fuse(std::span<const SlowTimeSeries> signals, const dsp::Band& band,
                  const dsp::WelchOptions& welch = {});

enum class EstimationMethod { spectral, time_domain, invalid };
const char* to_string(EstimationMethod m);

struct BandEstimate {
  /// NaN when invalid.
  double rate_bpm = 0.0;
  double freq_hz = 0.0;
  bool valid = false;
  EstimationMethod method = EstimationMethod::invalid;
  /// Adaptive band actually used.
  dsp::Band band;
  /// In-band spectral entropy of the fused signal.
  double entropy = 1.0;
  /// Fusion weights, standard then wavelet-enhanced.
  std::vector<double> weights;
};

struct VitalsConfig {
  dsp::WaveletDenoiseOptions wavelet{};
  dsp::BandpassSpec bandpass{0.1, 3.0, 4};
  std::size_t median_kernel = 5;
  std::size_t savgol_window = 11;
  std::size_t savgol_order = 3;
  dsp::WelchOptions welch{};
  dsp::Band respiration_band = dsp::kRespirationBand;
  dsp::Band cardiac_band = dsp::kCardiacBand;
  double respiration_half_width_hz = 0.3;
  double cardiac_half_width_hz = 0.5;
  double min_prominence_db = 3.0;
  /// Comb notch at f_r on the heart branch (only when f_r is valid).
  bool heart_comb = true;
};

struct VitalsReport {
  long long trajectory_id = -1;
  /// "energy" or "phase".
  std::string source = "energy";
  double range_m = 0.0;
  double angle_deg = 0.0;
  std::size_t first_frame = 0;

  BandEstimate respiration;
  BandEstimate heart;

  SlowTimeSeries raw;
  SlowTimeSeries denoised;
  SlowTimeSeries smoothed;
  SlowTimeSeries respiration_signal;
  SlowTimeSeries heart_signal;
};

/// Full chain: mean removal, wavelet denoising, 0.1-3 Hz bandpass, median
/// and Savitzky-Golay smoothing, Welch peaks, adaptive per-band filtering
/// (heart branch comb-notched at f_r), standard and wavelet-enhanced
/// variants fused by spectral entropy, rates from the fused spectra with a
/// time-domain fallback. Throws std::invalid_argument when the signal is
/// shorter than one Welch segment.
VitalsReport extract_vitals(const SlowTimeSeries& x, const VitalsConfig& config = {});

std::string report_to_json(const VitalsReport& report);

/// CSV columns time_s, raw_energy, denoised, respiration, heart.
void write_intermediate_csv(const VitalsReport& report, const std::filesystem::path& path);

}  // namespace mdv::vitals
