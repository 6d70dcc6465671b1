#include <cmath>

#include "kernels_impl.hpp"

namespace mdv::simd {

namespace {

// std::complex operator* goes through __muldc3 for NaN recovery; the
// explicit form is both faster and matches the vector path exactly.
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.imag() * b.real() + a.real() * b.imag()};
}

void mul_real_window(cplx* data, const double* w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) data[i] = {data[i].real() * w[i], data[i].imag() * w[i]};
}

void butterfly_stage(cplx* data, std::size_t n, std::size_t half, const cplx* tw) {
  const std::size_t len = 2 * half;
  for (std::size_t start = 0; start < n; start += len) {
    cplx* lo = data + start;
    cplx* hi = lo + half;
    for (std::size_t j = 0; j < half; ++j) {
      const cplx u = lo[j];
      const cplx v = mul(hi[j], tw[j]);
      lo[j] = {u.real() + v.real(), u.imag() + v.imag()};
      hi[j] = {u.real() - v.real(), u.imag() - v.imag()};
    }
  }
}

void butterfly_rows(cplx* lo, cplx* hi, cplx w, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    const cplx u = lo[j];
    const cplx v = mul(hi[j], w);
    lo[j] = {u.real() + v.real(), u.imag() + v.imag()};
    hi[j] = {u.real() - v.real(), u.imag() - v.imag()};
  }
}

void scale_real(cplx* data, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) data[i] = {data[i].real() * s, data[i].imag() * s};
}

void accumulate_norm(const cplx* z, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    acc[i] += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
  }
}

double sum_norm(const cplx* z, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += z[i].real() * z[i].real() + z[i].imag() * z[i].imag();
  return s;
}

cplx dot_conj(const cplx* x, const cplx* y, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
    im += x[i].imag() * y[i].real() - x[i].real() * y[i].imag();
  }
  return {re, im};
}

void update_moments(const cplx* z, double* slot, double* sum, double* sumsq, std::size_t n,
                    bool evict) {
  for (std::size_t i = 0; i < n; ++i) {
    if (evict) {
      const double old = slot[i];
      sum[i] -= old;
      sumsq[i] -= old * old;
    }
    const double m = std::sqrt(z[i].real() * z[i].real() + z[i].imag() * z[i].imag());
    slot[i] = m;
    sum[i] += m;
    sumsq[i] += m * m;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",        &mul_real_window, &butterfly_stage,
                                 &butterfly_rows,  &scale_real,      &accumulate_norm,
                                 &sum_norm,        &dot_conj,        &update_moments};
  return table;
}

}  // namespace mdv::simd
