#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mdv::dsp {

using cplx = std::complex<double>;

/// Radix-2 decimation-in-time FFT of a fixed power-of-two length.
/// Forward transform is unnormalized; inverse applies 1/n.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }

  void forward(std::span<cplx> data) const;
  void inverse(std::span<cplx> data) const;

  /// Transform every column of a row-major rows x cols block in place, where
  /// rows == size(). Each butterfly touches two whole rows.
  void forward_columns(std::span<cplx> block, std::size_t cols) const;

 private:
  void permute(std::span<cplx> data) const;
  void run(std::span<cplx> data, const std::vector<cplx>& twiddles) const;

  std::size_t n_;
  std::vector<std::uint32_t> bitrev_;
  // Per-stage twiddle tables laid end to end: stage with half-length h
  // starts at offset h - 1.
  std::vector<cplx> fwd_;
  std::vector<cplx> inv_;
};

/// Cached plan per length (thread-local).
const FftPlan& fft_plan(std::size_t n);

/// Forward FFT of a real signal zero-padded to nfft (power of two).
std::vector<cplx> rfft_padded(std::span<const double> x, std::size_t nfft);

}  // namespace mdv::dsp
