#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mdv::track {

struct CfarConfig {
  std::size_t guard_range = 2;
  std::size_t guard_doppler = 2;
  std::size_t training_range = 4;
  std::size_t training_doppler = 4;
  double probability_false_alarm = 1e-4;
  /// Rows with |d - centre| <= k are never declared; 0 disables.
  std::size_t zero_doppler_exclusion_bins = 2;

  /// Throws std::invalid_argument.
  void validate() const;
};

struct CfarCell {
  std::size_t doppler = 0;
  std::size_t range = 0;
  double statistic = 0.0;
  double threshold = 0.0;
  /// Mean of the training cells.
  double noise = 0.0;
};

/// alpha = N (Pfa^(-1/N) - 1), exact Pfa for exponential noise.
double ca_cfar_scale(std::size_t n_training, double pfa);

/// Cell-averaging CFAR on a row-major rows x cols power map (rows are
/// Doppler bins, zero Doppler at rows / 2). Windows are truncated at the
/// edges and alpha is recomputed from the training cells actually present.
/// A cell is declared when its value exceeds alpha times the training mean.
std::vector<CfarCell> cfar_2d(std::span<const double> map, std::size_t rows, std::size_t cols,
                              const CfarConfig& config);

}  // namespace mdv::track
