#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "mdv/core/types.hpp"

namespace mdv::dsp {

/// Multilevel decomposition. details[0] is the finest level; lengths[0] is
/// the original signal length, lengths[k] the length of the level-k
/// approximation.
struct WaveletDecomposition {
  std::vector<double> approx;
  std::vector<std::vector<double>> details;
  std::vector<std::size_t> lengths;
};

/// Orthogonal Daubechies-4 (8-tap) DWT with half-sample symmetric extension.
/// Each level keeps floor((N + 7) / 2) coefficients, so the inverse is exact
/// for any input length.
WaveletDecomposition wavedec_db4(std::span<const double> x, std::size_t levels);
std::vector<double> waverec_db4(const WaveletDecomposition& dec);

/// sign(w) * max(|w| - t, 0)
double soft_threshold(double w, double t);

struct WaveletDenoiseOptions {
  std::size_t levels = 3;
  /// Overrides the universal threshold sigma * sqrt(2 ln N) when set.
  std::optional<double> threshold;
};

/// Soft-threshold every detail level with one threshold. sigma is
/// median(|d1|) / 0.6745 from the finest details. Throws
/// std::invalid_argument when the signal is shorter than 2^levels.
SlowTimeSeries dwt_denoise(const SlowTimeSeries& x, const WaveletDenoiseOptions& options = {});
std::vector<double> dwt_denoise(std::span<const double> x, const WaveletDenoiseOptions& options = {});

}  // namespace mdv::dsp
