#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mdv/rd/range_doppler.hpp"

namespace mdv::spatial {

struct Cell {
  std::size_t doppler = 0;
  std::size_t range = 0;
};

/// Sample covariance (1/N) sum x x^H of antenna snapshots.
struct SpatialCovariance {
  Eigen::MatrixXcd matrix;
  std::size_t num_snapshots = 0;
  /// Fewer snapshots than antennas; MUSIC still runs thanks to loading.
  bool rank_deficient = false;
};

/// Snapshots are the columns of x (one row per antenna).
SpatialCovariance covariance_from_snapshots(const Eigen::MatrixXcd& x);
/// Averages over every cell of the map.
SpatialCovariance estimate_covariance(const rd::RangeDopplerFrame& frame);
/// Averages over the listed cells.
SpatialCovariance estimate_covariance(const rd::RangeDopplerFrame& frame, std::span<const Cell> cells);

/// a[m] = exp(j 2 pi m d sin(theta)). Throws for |angle| > 90.
Eigen::VectorXcd steering_vector(double angle_deg, std::size_t n_antennas, double spacing_wavelengths);

struct AngleGrid {
  double min_deg = -90.0;
  double max_deg = 90.0;
  double step_deg = 0.5;

  std::vector<double> points() const;
};

struct MusicSpectrum {
  std::vector<double> angles_deg;
  std::vector<double> power;
  std::size_t num_sources = 0;
};

struct MusicOptions {
  AngleGrid grid;
  double spacing_wavelengths = 0.5;
  /// R + loading * trace(R) / N * I before the eigendecomposition.
  double diagonal_loading = 1e-6;
};

/// P(theta) = 1 / (a^H En En^H a). Throws std::invalid_argument unless
/// 1 <= num_sources < N.
MusicSpectrum music_spectrum(const SpatialCovariance& cov, std::size_t num_sources,
                             const MusicOptions& options = {});

/// Angles of the `count` strongest local maxima, refined by a parabola
/// through the three grid points around each maximum (in dB). Ordered by
/// decreasing power; fewer when the spectrum has fewer maxima.
std::vector<double> music_peaks(const MusicSpectrum& spectrum, std::size_t count);

/// Largest k with lambda_k / lambda_{k+1} > gap_threshold (eigenvalues in
/// decreasing order, after diagonal loading), clamped to [1, N - 1].
std::size_t estimate_num_sources(const SpatialCovariance& cov, double gap_threshold = 3.0,
                                 double diagonal_loading = 1e-6);

}  // namespace mdv::spatial
