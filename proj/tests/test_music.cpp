#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mdv/rd/range_doppler.hpp"
#include "mdv/sim/scene.hpp"
#include "mdv/spatial/music.hpp"

using namespace mdv;
using namespace mdv::spatial;

namespace {

rd::RangeDopplerFrame frame_from(const std::vector<std::vector<Complex>>& antennas, std::size_t d, std::size_t r) {
  rd::RangeDopplerFrame f;
  f.rx = antennas.size();
  f.doppler_bins = d;
  f.range_bins = r;
  for (const auto& a : antennas) f.data.insert(f.data.end(), a.begin(), a.end());
  return f;
}

SpatialCovariance sources_cov(const std::vector<double>& angles, double snr_db, std::size_t snapshots, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  const double noise = std::pow(10.0, -snr_db / 20.0) / std::sqrt(2.0);
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Zero(4, static_cast<Eigen::Index>(snapshots));
  for (double a : angles) {
    const Eigen::VectorXcd s = steering_vector(a, 4, 0.5);
    for (std::size_t k = 0; k < snapshots; ++k) {
      const Complex amp = std::polar(1.0, 2.0 * M_PI * std::uniform_real_distribution<double>()(rng));
      x.col(static_cast<Eigen::Index>(k)) += amp * s;
    }
  }
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += Complex(g(rng), g(rng)) * noise;
  return covariance_from_snapshots(x);
}

}  // namespace

TEST_SUITE("covariance") {
  TEST_CASE("single snapshot outer product") {
    Eigen::MatrixXcd x(2, 1);
    x << Complex(1, 0), Complex(0, 1);
    const auto cov = covariance_from_snapshots(x);
    CHECK(std::abs(cov.matrix(0, 0) - Complex(1, 0)) < 1e-15);
    CHECK(std::abs(cov.matrix(0, 1) - Complex(0, -1)) < 1e-15);
    CHECK(std::abs(cov.matrix(1, 0) - Complex(0, 1)) < 1e-15);
    CHECK(std::abs(cov.matrix(1, 1) - Complex(1, 0)) < 1e-15);
    CHECK(cov.num_snapshots == 1);
    CHECK(cov.rank_deficient);
  }

  TEST_CASE("identical antennas give a rank-one all-equal matrix") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    std::vector<Complex> v(8 * 16);
    for (auto& z : v) z = Complex(g(rng), g(rng));
    const auto f = frame_from({v, v, v, v}, 8, 16);
    const auto cov = estimate_covariance(f);
    CHECK(cov.num_snapshots == 128);
    CHECK_FALSE(cov.rank_deficient);
    for (Eigen::Index i = 0; i < 4; ++i) {
      for (Eigen::Index j = 0; j < 4; ++j) CHECK(std::abs(cov.matrix(i, j) - cov.matrix(0, 0)) < 1e-12);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.matrix);
    CHECK(es.eigenvalues()(2) < 1e-12 * es.eigenvalues()(3));
  }

  TEST_CASE("white noise covariance is close to sigma^2 I") {
    RadarConfig c;
    c.num_frames = 1;
    sim::SceneSpec scene;
    scene.noise_stddev = 1.0;
    scene.seed = 5;
    const auto f = rd::range_doppler(sim::simulate(scene, c)).frames[0];
    const auto cov = estimate_covariance(f);
    CHECK(cov.num_snapshots == 64 * 256);
    for (Eigen::Index i = 0; i < 4; ++i) {
      for (Eigen::Index j = 0; j < 4; ++j) {
        if (i != j) CHECK(std::abs(cov.matrix(i, j)) < 0.05 * cov.matrix(i, i).real());
      }
    }
  }

  TEST_CASE("covariance is Hermitian and PSD") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto cov = sources_cov({-10.0, 40.0}, 5.0, 3 + seed, seed);
      CHECK((cov.matrix - cov.matrix.adjoint()).norm() <= 1e-14 * cov.matrix.norm());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(cov.matrix);
      CHECK(es.eigenvalues().minCoeff() >= -1e-9 * es.eigenvalues().maxCoeff());
    }
  }

  TEST_CASE("cell selection averages only the chosen cells") {
    std::vector<Complex> a(4, 0.0), b(4, 0.0);
    a[1] = Complex(2, 0);
    b[1] = Complex(0, 2);
    a[3] = 100.0;
    const auto f = frame_from({a, b}, 2, 2);
    const std::vector<Cell> cells{{0, 1}};
    const auto cov = estimate_covariance(f, cells);
    CHECK(std::abs(cov.matrix(0, 1) - Complex(0, -4)) < 1e-12);
    CHECK(cov.rank_deficient);
  }
}

TEST_SUITE("steering") {
  TEST_CASE("broadside is all ones, endfire alternates") {
    const auto a0 = steering_vector(0.0, 4, 0.5);
    for (Eigen::Index m = 0; m < 4; ++m) CHECK(std::abs(a0(m) - Complex(1, 0)) < 1e-15);
    const auto a90 = steering_vector(90.0, 4, 0.5);
    for (Eigen::Index m = 0; m < 4; ++m) CHECK(std::abs(a90(m) - Complex(m % 2 ? -1.0 : 1.0, 0.0)) < 1e-12);
    CHECK_THROWS_AS(steering_vector(91.0, 4, 0.5), std::invalid_argument);
  }

  TEST_CASE("unit modulus entries") {
    for (double th = -90.0; th <= 90.0; th += 7.5) {
      const auto a = steering_vector(th, 6, 0.5);
      CHECK(a.squaredNorm() == doctest::Approx(6.0));
    }
  }
}

TEST_SUITE("music") {
  TEST_CASE("noiseless single source peaks within one grid step") {
    for (double th : {-60.0, -20.0, 0.0, 20.0, 33.3, 75.0}) {
      const Eigen::VectorXcd a = steering_vector(th, 4, 0.5);
      SpatialCovariance cov{a * a.adjoint(), 1, true};
      const auto spec = music_spectrum(cov, 1);
      const auto it = std::max_element(spec.power.begin(), spec.power.end());
      CHECK(std::fabs(spec.angles_deg[static_cast<std::size_t>(it - spec.power.begin())] - th) <= 0.5);
      for (double p : spec.power) CHECK(p > 0.0);
    }
  }

  TEST_CASE("two sources at 20 dB are resolved within 2 degrees") {
    const auto cov = sources_cov({-30.0, 30.0}, 20.0, 200, 11);
    auto peaks = music_peaks(music_spectrum(cov, 2), 2);
    REQUIRE(peaks.size() == 2);
    std::sort(peaks.begin(), peaks.end());
    CHECK(std::fabs(peaks[0] + 30.0) <= 2.0);
    CHECK(std::fabs(peaks[1] - 30.0) <= 2.0);
  }

  TEST_CASE("identity covariance gives a flat spectrum") {
    SpatialCovariance cov{Eigen::MatrixXcd::Identity(4, 4), 100, false};
    const auto spec = music_spectrum(cov, 1);
    const auto [lo, hi] = std::minmax_element(spec.power.begin(), spec.power.end());
    CHECK((*hi - *lo) / *lo <= 1e-6);
  }

  TEST_CASE("scaling the covariance keeps the peak") {
    const auto cov = sources_cov({12.0}, 10.0, 100, 2);
    const auto p1 = music_peaks(music_spectrum(cov, 1), 1);
    SpatialCovariance scaled = cov;
    scaled.matrix *= 37.5;
    const auto p2 = music_peaks(music_spectrum(scaled, 1), 1);
    CHECK(p1.at(0) == doctest::Approx(p2.at(0)).epsilon(1e-9));
  }

  TEST_CASE("source count out of range throws") {
    SpatialCovariance cov{Eigen::MatrixXcd::Identity(4, 4), 100, false};
    CHECK_THROWS_AS(music_spectrum(cov, 0), std::invalid_argument);
    CHECK_THROWS_AS(music_spectrum(cov, 4), std::invalid_argument);
  }

  TEST_CASE("grid is strictly increasing") {
    const auto pts = AngleGrid{}.points();
    CHECK(pts.front() == -90.0);
    CHECK(pts.back() == 90.0);
    CHECK(pts.size() == 361);
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i] > pts[i - 1]);
  }
}

TEST_SUITE("source count") {
  TEST_CASE("rank one plus tiny noise is one source") {
    const Eigen::VectorXcd a = steering_vector(25.0, 4, 0.5);
    SpatialCovariance cov{a * a.adjoint() + 1e-6 * Eigen::MatrixXcd::Identity(4, 4), 100, false};
    CHECK(estimate_num_sources(cov) == 1);
  }

  TEST_CASE("identity clamps to one") {
    SpatialCovariance cov{Eigen::MatrixXcd::Identity(4, 4), 100, false};
    CHECK(estimate_num_sources(cov) == 1);
  }

  TEST_CASE("two equal well-separated sources are counted") {
    CHECK(estimate_num_sources(sources_cov({-30.0, 30.0}, 20.0, 500, 4)) == 2);
  }
}
