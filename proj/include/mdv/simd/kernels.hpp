#pragma once

// Hot inner loops of the pipeline. Each kernel has a scalar reference
// implementation and, on x86-64, an AVX2 variant; the table used by the rest
// of the code is picked once at startup from the CPU's feature bits.
//
// Element-wise kernels (window, butterfly, moments, norm accumulation) are
// required to be bit-identical across variants. Reductions (sum_norm,
// dot_conj) reassociate the sum and agree only to rounding.

#include <complex>
#include <cstddef>
#include <string_view>

namespace mdv::simd {

using cplx = std::complex<double>;

struct KernelTable {
  std::string_view name;

  /// data[i] *= w[i]
  void (*mul_real_window)(cplx* data, const double* w, std::size_t n);

  /// One radix-2 decimation-in-time stage over a full transform of length n.
  /// tw holds half twiddles e^{-2 pi i j / (2 half)} (conjugated for inverse
  /// by the caller).
  void (*butterfly_stage)(cplx* data, std::size_t n, std::size_t half, const cplx* tw);

  /// Butterfly between two whole rows sharing one twiddle:
  /// v = hi*w; lo = lo + v; hi = lo - v. Batched FFTs over columns use it.
  void (*butterfly_rows)(cplx* lo, cplx* hi, cplx w, std::size_t n);

  /// data[i] *= s
  void (*scale_real)(cplx* data, double s, std::size_t n);

  /// acc[i] += |z[i]|^2
  void (*accumulate_norm)(const cplx* z, double* acc, std::size_t n);

  /// sum |z[i]|^2
  double (*sum_norm)(const cplx* z, std::size_t n);

  /// sum x[i] * conj(y[i])
  cplx (*dot_conj)(const cplx* x, const cplx* y, std::size_t n);

  /// Sliding-window magnitude moments. For each i: m = |z[i]|; if evict,
  /// remove slot[i] from sum/sumsq; store m in slot[i]; add m to sum/sumsq.
  void (*update_moments)(const cplx* z, double* slot, double* sum, double* sumsq, std::size_t n,
                         bool evict);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant is not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Best table for this machine. MDV_SIMD=scalar in the environment forces
/// the reference path.
const KernelTable& kernels();

}  // namespace mdv::simd
