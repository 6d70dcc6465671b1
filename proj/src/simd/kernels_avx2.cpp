#include <immintrin.h>

#include <cmath>

#include "kernels_impl.hpp"

namespace mdv::simd {

namespace {

inline const double* dptr(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dptr(cplx* p) { return reinterpret_cast<double*>(p); }

// (a0 a1) -> (a0 a0 a1 a1)
inline __m256d spread_pair(const double* w) {
  const __m128d w2 = _mm_loadu_pd(w);
  return _mm256_insertf128_pd(_mm256_castpd128_pd256(_mm_unpacklo_pd(w2, w2)),
                              _mm_unpackhi_pd(w2, w2), 1);
}

// Complex product of two packed pairs; same operation order as the scalar
// reference so the results are bit-identical.
inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_sw = _mm256_permute_pd(a, 0x5);
  return _mm256_addsub_pd(_mm256_mul_pd(a, b_re), _mm256_mul_pd(a_sw, b_im));
}

// |z|^2 for four consecutive complex values, in order.
inline __m256d norm4(const cplx* z) {
  const __m256d a = _mm256_loadu_pd(dptr(z));
  const __m256d b = _mm256_loadu_pd(dptr(z + 2));
  const __m256d h = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
  return _mm256_permute4x64_pd(h, 0b11011000);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void mul_real_window(cplx* data, const double* w, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d d = _mm256_loadu_pd(dptr(data + i));
    _mm256_storeu_pd(dptr(data + i), _mm256_mul_pd(d, spread_pair(w + i)));
  }
  for (; i < n; ++i) data[i] = {data[i].real() * w[i], data[i].imag() * w[i]};
}

void butterfly_stage(cplx* data, std::size_t n, std::size_t half, const cplx* tw) {
  if (half < 2) {
    scalar_kernels().butterfly_stage(data, n, half, tw);
    return;
  }
  const std::size_t len = 2 * half;
  for (std::size_t start = 0; start < n; start += len) {
    double* lo = dptr(data + start);
    double* hi = dptr(data + start + half);
    for (std::size_t j = 0; j < half; j += 2) {
      const __m256d u = _mm256_loadu_pd(lo + 2 * j);
      const __m256d v = cmul(_mm256_loadu_pd(hi + 2 * j), _mm256_loadu_pd(dptr(tw + j)));
      _mm256_storeu_pd(lo + 2 * j, _mm256_add_pd(u, v));
      _mm256_storeu_pd(hi + 2 * j, _mm256_sub_pd(u, v));
    }
  }
}

void butterfly_rows(cplx* lo, cplx* hi, cplx w, std::size_t n) {
  const __m256d wv = _mm256_setr_pd(w.real(), w.imag(), w.real(), w.imag());
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const __m256d u = _mm256_loadu_pd(dptr(lo + j));
    const __m256d v = cmul(_mm256_loadu_pd(dptr(hi + j)), wv);
    _mm256_storeu_pd(dptr(lo + j), _mm256_add_pd(u, v));
    _mm256_storeu_pd(dptr(hi + j), _mm256_sub_pd(u, v));
  }
  if (j < n) scalar_kernels().butterfly_rows(lo + j, hi + j, w, n - j);
}

void scale_real(cplx* data, double s, std::size_t n) {
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    _mm256_storeu_pd(dptr(data + i), _mm256_mul_pd(_mm256_loadu_pd(dptr(data + i)), sv));
  }
  for (; i < n; ++i) data[i] = {data[i].real() * s, data[i].imag() * s};
}

void accumulate_norm(const cplx* z, double* acc, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), norm4(z + i)));
  }
  for (; i < n; ++i) acc[i] += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
}

double sum_norm(const cplx* z, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(dptr(z + i));
    const __m256d b = _mm256_loadu_pd(dptr(z + i + 2));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(a, a));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(b, b));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
  return s;
}

cplx dot_conj(const cplx* x, const cplx* y, std::size_t n) {
  __m256d same = _mm256_setzero_pd();   // xr*yr, xi*yi
  __m256d cross = _mm256_setzero_pd();  // xr*yi, xi*yr
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(dptr(x + i));
    const __m256d b = _mm256_loadu_pd(dptr(y + i));
    same = _mm256_add_pd(same, _mm256_mul_pd(a, b));
    cross = _mm256_add_pd(cross, _mm256_mul_pd(a, _mm256_permute_pd(b, 0x5)));
  }
  alignas(32) double s[4], c[4];
  _mm256_store_pd(s, same);
  _mm256_store_pd(c, cross);
  double re = (s[0] + s[2]) + (s[1] + s[3]);
  double im = (c[1] + c[3]) - (c[0] + c[2]);
  for (; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].imag() * y[i].real() - x[i].real() * y[i].imag();
  }
  return {re, im};
}

void update_moments(const cplx* z, double* slot, double* sum, double* sumsq, std::size_t n,
                    bool evict) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d s = _mm256_loadu_pd(sum + i);
    __m256d q = _mm256_loadu_pd(sumsq + i);
    if (evict) {
      const __m256d old = _mm256_loadu_pd(slot + i);
      s = _mm256_sub_pd(s, old);
      q = _mm256_sub_pd(q, _mm256_mul_pd(old, old));
    }
    const __m256d m = _mm256_sqrt_pd(norm4(z + i));
    _mm256_storeu_pd(slot + i, m);
    _mm256_storeu_pd(sum + i, _mm256_add_pd(s, m));
    _mm256_storeu_pd(sumsq + i, _mm256_add_pd(q, _mm256_mul_pd(m, m)));
  }
  if (i < n) scalar_kernels().update_moments(z + i, slot + i, sum + i, sumsq + i, n - i, evict);
}

}  // namespace

namespace detail {

const KernelTable* avx2_table() {
  static const KernelTable table{"avx2",           &mul_real_window, &butterfly_stage,
                                 &butterfly_rows,  &scale_real,      &accumulate_norm,
                                 &sum_norm,        &dot_conj,        &update_moments};
  return &table;
}

}  // namespace detail

}  // namespace mdv::simd
