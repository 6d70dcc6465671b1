#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "mdv/simd/kernels.hpp"

using mdv::simd::cplx;
using mdv::simd::KernelTable;

namespace {

std::vector<cplx> random_complex(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(g(rng), g(rng));
  return v;
}

std::vector<double> random_real(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

bool same_bits(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(cplx)) == 0;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Lengths cover the vector body and every remainder.
constexpr std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 15, 16, 17, 64, 255, 256, 1023};

}  // namespace

TEST_CASE("dispatch picks a usable table") {
  const KernelTable& k = mdv::simd::kernels();
  CHECK(!k.name.empty());
  CHECK(mdv::simd::scalar_kernels().name == "scalar");
  if (const KernelTable* avx = mdv::simd::avx2_kernels()) {
    CHECK(avx->name == "avx2");
  }
}

TEST_CASE("avx2 kernels match the scalar reference") {
  const KernelTable* avx = mdv::simd::avx2_kernels();
  if (avx == nullptr) {
    MESSAGE("AVX2 unavailable on this machine; equivalence not exercised");
    return;
  }
  const KernelTable& ref = mdv::simd::scalar_kernels();

  SUBCASE("mul_real_window bit-identical") {
    for (std::size_t n : kLengths) {
      auto a = random_complex(n, 1 + n);
      auto b = a;
      const auto w = random_real(n, 100 + n);
      ref.mul_real_window(a.data(), w.data(), n);
      avx->mul_real_window(b.data(), w.data(), n);
      CHECK(same_bits(a, b));
    }
  }

  SUBCASE("scale_real bit-identical") {
    for (std::size_t n : kLengths) {
      auto a = random_complex(n, 2 + n);
      auto b = a;
      ref.scale_real(a.data(), 0.37, n);
      avx->scale_real(b.data(), 0.37, n);
      CHECK(same_bits(a, b));
    }
  }

  SUBCASE("butterfly_stage bit-identical over all stages") {
    for (std::size_t n : {2u, 4u, 8u, 16u, 64u, 256u}) {
      auto a = random_complex(n, 3 + n);
      auto b = a;
      for (std::size_t half = 1; half < n; half *= 2) {
        std::vector<cplx> tw(half);
        for (std::size_t j = 0; j < half; ++j) tw[j] = std::polar(1.0, -M_PI * static_cast<double>(j) / static_cast<double>(half));
        ref.butterfly_stage(a.data(), n, half, tw.data());
        avx->butterfly_stage(b.data(), n, half, tw.data());
      }
      CHECK(same_bits(a, b));
    }
  }

  SUBCASE("butterfly_rows bit-identical") {
    for (std::size_t n : kLengths) {
      auto lo_a = random_complex(n, 4 + n), hi_a = random_complex(n, 5 + n);
      auto lo_b = lo_a, hi_b = hi_a;
      const cplx w = std::polar(1.0, 0.3);
      ref.butterfly_rows(lo_a.data(), hi_a.data(), w, n);
      avx->butterfly_rows(lo_b.data(), hi_b.data(), w, n);
      CHECK(same_bits(lo_a, lo_b));
      CHECK(same_bits(hi_a, hi_b));
    }
  }

  SUBCASE("accumulate_norm bit-identical") {
    for (std::size_t n : kLengths) {
      const auto z = random_complex(n, 6 + n);
      auto acc_a = random_real(n, 7 + n);
      auto acc_b = acc_a;
      ref.accumulate_norm(z.data(), acc_a.data(), n);
      avx->accumulate_norm(z.data(), acc_b.data(), n);
      CHECK(same_bits(acc_a, acc_b));
    }
  }

  SUBCASE("update_moments bit-identical with and without eviction") {
    for (std::size_t n : kLengths) {
      const auto z1 = random_complex(n, 8 + n);
      const auto z2 = random_complex(n, 9 + n);
      std::vector<double> slot_a(n, 0.0), sum_a(n, 0.0), sq_a(n, 0.0);
      auto slot_b = slot_a, sum_b = sum_a, sq_b = sq_a;
      ref.update_moments(z1.data(), slot_a.data(), sum_a.data(), sq_a.data(), n, false);
      avx->update_moments(z1.data(), slot_b.data(), sum_b.data(), sq_b.data(), n, false);
      ref.update_moments(z2.data(), slot_a.data(), sum_a.data(), sq_a.data(), n, true);
      avx->update_moments(z2.data(), slot_b.data(), sum_b.data(), sq_b.data(), n, true);
      CHECK(same_bits(slot_a, slot_b));
      CHECK(same_bits(sum_a, sum_b));
      CHECK(same_bits(sq_a, sq_b));
    }
  }

  SUBCASE("reductions agree to rounding") {
    for (std::size_t n : kLengths) {
      const auto x = random_complex(n, 10 + n);
      const auto y = random_complex(n, 11 + n);
      const double sa = ref.sum_norm(x.data(), n), sb = avx->sum_norm(x.data(), n);
      CHECK(std::fabs(sa - sb) <= 1e-12 * (1.0 + sa));
      const cplx da = ref.dot_conj(x.data(), y.data(), n), db = avx->dot_conj(x.data(), y.data(), n);
      double scale = 1.0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(x[i]) * std::abs(y[i]);
      CHECK(std::abs(da - db) <= 1e-13 * scale);
    }
  }
}

TEST_CASE("scalar kernels compute what they document") {
  const KernelTable& k = mdv::simd::scalar_kernels();
  std::vector<cplx> z{{3.0, 4.0}, {1.0, -1.0}};
  CHECK(k.sum_norm(z.data(), 2) == doctest::Approx(27.0));
  std::vector<cplx> y{{0.0, 1.0}, {2.0, 0.0}};
  const cplx d = k.dot_conj(z.data(), y.data(), 2);
  // (3+4j)(-j) + (1-j)(2) = 4 - 3j + 2 - 2j
  CHECK(d.real() == doctest::Approx(6.0));
  CHECK(d.imag() == doctest::Approx(-5.0));
  std::vector<double> slot(2, 0.0), sum(2, 0.0), sq(2, 0.0);
  k.update_moments(z.data(), slot.data(), sum.data(), sq.data(), 2, false);
  CHECK(slot[0] == doctest::Approx(5.0));
  CHECK(sq[0] == doctest::Approx(25.0));
  k.update_moments(y.data(), slot.data(), sum.data(), sq.data(), 2, true);
  CHECK(sum[0] == doctest::Approx(1.0));
  CHECK(sum[1] == doctest::Approx(2.0));
}
