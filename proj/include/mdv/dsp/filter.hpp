#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "mdv/core/types.hpp"

namespace mdv::dsp {

class FilterDesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BandpassSpec {
  double low_hz = 0.1;
  double high_hz = 3.0;
  /// Prototype order; the bandpass has 2 * order poles.
  std::size_t order = 4;
};

/// Second-order section, a0 normalised to 1.
struct Biquad {
  double b0, b1, b2, a1, a2;
};

/// Digital Butterworth bandpass via analog prototype, lowpass-to-bandpass
/// transform and the bilinear transform with frequency pre-warping. Unity
/// gain at the band's geometric centre. Throws FilterDesignError on invalid
/// edges or when a pole lands on or outside the unit circle.
std::vector<Biquad> butter_bandpass(const BandpassSpec& spec, double sample_rate_hz);

/// Causal cascade filter with optional per-section initial state (2 values
/// per section, transposed direct form II).
std::vector<double> sosfilt(std::span<const Biquad> sos, std::span<const double> x,
                            std::span<const double> initial_state = {});

/// Steady-state section states for a unit step input.
std::vector<double> sosfilt_zi(std::span<const Biquad> sos);

/// Zero-phase forward-backward filtering with odd-reflection padding of
/// 3 * (2 * sections + 1) samples and steady-state initial conditions.
std::vector<double> sosfiltfilt(std::span<const Biquad> sos, std::span<const double> x);

/// Magnitude response |H(e^{j 2 pi f / fs})| of the cascade.
double sos_magnitude(std::span<const Biquad> sos, double freq_hz, double sample_rate_hz);

SlowTimeSeries butter_bandpass_filtfilt(const SlowTimeSeries& x, const BandpassSpec& spec);

/// Comb length M = round(fs / f0) used by comb_notch.
std::size_t comb_length(double sample_rate_hz, double fundamental_hz);

/// Magnitude of one pass of the M-point running mean,
/// |sin(pi f M / fs) / (M sin(pi f / fs))|.
double comb_magnitude(std::size_t m, double freq_hz, double sample_rate_hz);

/// M-point running mean applied forward and backward (zero phase, response
/// comb_magnitude^2). Nulls f0 and all its harmonics. Edges are padded by
/// even reflection of M samples; expect transients within M samples of either
/// end. Throws std::invalid_argument when M < 2 or M exceeds the length.
SlowTimeSeries comb_notch(const SlowTimeSeries& x, double fundamental_hz);

/// Sliding median with reflected edges (x[-1] = x[1]). Kernel must be odd.
std::vector<double> median_filter(std::span<const double> x, std::size_t kernel = 5);
SlowTimeSeries median_filter(const SlowTimeSeries& x, std::size_t kernel = 5);

/// Smoothing coefficients c[-M..M] (stored from index 0) of the
/// least-squares polynomial fit evaluated at the window centre.
std::vector<double> savgol_coefficients(std::size_t window, std::size_t poly_order);

/// Savitzky-Golay smoothing. Interior samples use the convolution
/// coefficients; the first and last window/2 samples are evaluated from the
/// polynomial fitted to the first and last full window, so the filter is
/// exact on polynomials of degree <= poly_order everywhere.
std::vector<double> savitzky_golay(std::span<const double> x, std::size_t window = 11,
                                   std::size_t poly_order = 3);
SlowTimeSeries savitzky_golay(const SlowTimeSeries& x, std::size_t window = 11,
                              std::size_t poly_order = 3);

}  // namespace mdv::dsp
