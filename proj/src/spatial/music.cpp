#include "mdv/spatial/music.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mdv/simd/kernels.hpp"

namespace mdv::spatial {

namespace {

Eigen::MatrixXcd loaded(const SpatialCovariance& cov, double loading) {
  const auto n = cov.matrix.rows();
  const double tr = cov.matrix.trace().real();
  const double delta = tr > 0.0 ? loading * tr / static_cast<double>(n) : loading;
  Eigen::MatrixXcd r = cov.matrix;
  r.diagonal().array() += delta;
  return r;
}

// Covariance from per-antenna rows stored contiguously, row m at
// rows + m * stride.
SpatialCovariance from_rows(const Complex* rows, std::size_t n_rx, std::size_t stride, std::size_t count) {
  SpatialCovariance cov;
  cov.matrix = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n_rx), static_cast<Eigen::Index>(n_rx));
  cov.num_snapshots = count;
  cov.rank_deficient = count < n_rx;
  if (count == 0) return cov;
  const auto& k = simd::kernels();
  const double inv = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < n_rx; ++i) {
    for (std::size_t j = i; j < n_rx; ++j) {
      const Complex v = k.dot_conj(rows + i * stride, rows + j * stride, count) * inv;
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      cov.matrix(ii, jj) = v;
      cov.matrix(jj, ii) = std::conj(v);
    }
    const auto ii = static_cast<Eigen::Index>(i);
    cov.matrix(ii, ii) = cov.matrix(ii, ii).real();
  }
  return cov;
}

}  // namespace

SpatialCovariance covariance_from_snapshots(const Eigen::MatrixXcd& x) {
  // Row-major copy so each antenna's snapshots are contiguous.
  const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = x;
  return from_rows(rows.data(), static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(x.cols()),
                   static_cast<std::size_t>(x.cols()));
}

SpatialCovariance estimate_covariance(const rd::RangeDopplerFrame& frame) {
  return from_rows(frame.data.data(), frame.rx, frame.cells(), frame.cells());
}

SpatialCovariance estimate_covariance(const rd::RangeDopplerFrame& frame, std::span<const Cell> cells) {
  std::vector<Complex> rows(frame.rx * cells.size());
  for (std::size_t m = 0; m < frame.rx; ++m) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (cells[c].doppler >= frame.doppler_bins || cells[c].range >= frame.range_bins) {
        throw std::out_of_range("estimate_covariance: cell outside the map");
      }
      rows[m * cells.size() + c] = frame.at(m, cells[c].doppler, cells[c].range);
    }
  }
  return from_rows(rows.data(), frame.rx, cells.size(), cells.size());
}

Eigen::VectorXcd steering_vector(double angle_deg, std::size_t n, double spacing) {
  if (!(std::fabs(angle_deg) <= 90.0)) {
    throw std::invalid_argument("steering_vector: angle must lie in [-90, 90], got " + std::to_string(angle_deg));
  }
  const double psi = 2.0 * std::numbers::pi * spacing * std::sin(angle_deg * std::numbers::pi / 180.0);
  Eigen::VectorXcd a(static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < n; ++m) a(static_cast<Eigen::Index>(m)) = std::polar(1.0, psi * static_cast<double>(m));
  return a;
}

std::vector<double> AngleGrid::points() const {
  if (!(step_deg > 0.0) || !(max_deg >= min_deg)) throw std::invalid_argument("invalid angle grid");
  const auto n = static_cast<std::size_t>(std::floor((max_deg - min_deg) / step_deg + 1e-9)) + 1;
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = min_deg + step_deg * static_cast<double>(i);
  return g;
}

MusicSpectrum music_spectrum(const SpatialCovariance& cov, std::size_t num_sources, const MusicOptions& options) {
  const auto n = static_cast<std::size_t>(cov.matrix.rows());
  if (num_sources < 1 || num_sources >= n) {
    throw std::invalid_argument("music_spectrum: num_sources must lie in [1, " + std::to_string(n) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(loaded(cov, options.diagonal_loading));
  if (solver.info() != Eigen::Success) throw std::runtime_error("music_spectrum: eigendecomposition failed");
  // Eigenvalues ascend, so the noise subspace is the leading block.
  const Eigen::MatrixXcd en = solver.eigenvectors().leftCols(static_cast<Eigen::Index>(n - num_sources));

  MusicSpectrum out;
  out.num_sources = num_sources;
  out.angles_deg = options.grid.points();
  out.power.resize(out.angles_deg.size());
  for (std::size_t i = 0; i < out.angles_deg.size(); ++i) {
    const Eigen::VectorXcd a = steering_vector(out.angles_deg[i], n, options.spacing_wavelengths);
    const double denom = (en.adjoint() * a).squaredNorm();
    out.power[i] = 1.0 / std::max(denom, 1e-300);
  }
  return out;
}

std::vector<double> music_peaks(const MusicSpectrum& s, std::size_t count) {
  const std::size_t n = s.power.size();
  std::vector<std::size_t> maxima;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || s.power[i] > s.power[i - 1];
    const bool right = i + 1 == n || s.power[i] >= s.power[i + 1];
    if (left && right && n > 1) maxima.push_back(i);
  }
  std::sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) { return s.power[a] > s.power[b]; });
  if (maxima.size() > count) maxima.resize(count);

  std::vector<double> angles;
  for (std::size_t i : maxima) {
    double angle = s.angles_deg[i];
    if (i > 0 && i + 1 < n) {
      const double yl = 10.0 * std::log10(s.power[i - 1]);
      const double y0 = 10.0 * std::log10(s.power[i]);
      const double yr = 10.0 * std::log10(s.power[i + 1]);
      const double den = yl - 2.0 * y0 + yr;
      if (den < 0.0) {
        const double off = std::clamp(0.5 * (yl - yr) / den, -0.5, 0.5);
        angle += off * (s.angles_deg[i + 1] - s.angles_deg[i]);
      }
    }
    angles.push_back(angle);
  }
  return angles;
}

std::size_t estimate_num_sources(const SpatialCovariance& cov, double gap, double loading) {
  const auto n = static_cast<std::size_t>(cov.matrix.rows());
  if (n < 2) return 1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(loaded(cov, loading), Eigen::EigenvaluesOnly);
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = solver.eigenvalues()(static_cast<Eigen::Index>(n - 1 - i));
  std::size_t k = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (ev[i] > 0.0 && ev[i - 1] / ev[i] > gap) k = i;
  }
  return std::clamp<std::size_t>(k, 1, n - 1);
}

}  // namespace mdv::spatial
