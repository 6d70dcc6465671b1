#pragma once

#include <cstddef>
#include <vector>

#include "mdv/core/types.hpp"

namespace mdv::dsp {

/// Closed frequency interval [low_hz, high_hz].
struct Band {
  double low_hz = 0.0;
  double high_hz = 0.0;

  bool contains(double f) const { return f >= low_hz && f <= high_hz; }
};

inline constexpr Band kRespirationBand{0.1, 0.8};
inline constexpr Band kCardiacBand{0.8, 3.0};

/// One-sided power spectral density on the grid k * fs / nfft, k = 0..nfft/2.
struct PsdEstimate {
  std::vector<double> freqs_hz;
  std::vector<double> power;
  std::size_t segment_length = 0;
  double overlap = 0.0;
  std::size_t num_segments = 0;

  double bin_width_hz() const { return freqs_hz.size() > 1 ? freqs_hz[1] - freqs_hz[0] : 0.0; }
};

struct WelchOptions {
  /// Samples per segment; 0 means 30 s of data at the series' rate.
  std::size_t segment_length = 0;
  double overlap = 0.5;
  /// FFT length; 0 means the next power of two >= segment_length.
  std::size_t nfft = 0;
};

/// Averaged Hanning-windowed periodograms, each segment mean-removed,
/// density-scaled (power per Hz). Throws std::invalid_argument when the
/// signal is shorter than one segment.
PsdEstimate welch_psd(const SlowTimeSeries& x, const WelchOptions& options = {});

/// Normalised Shannon entropy of the in-band PSD, -sum p log p / log n.
/// A single in-band bin gives 0; zero in-band power gives 1 (worst quality).
/// Throws std::invalid_argument when no bin falls in the band.
double spectral_entropy(const PsdEstimate& psd, const Band& band);

}  // namespace mdv::dsp
