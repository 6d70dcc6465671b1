#include "mdv/dsp/fft.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mdv/simd/kernels.hpp"

namespace mdv::dsp {

FftPlan::FftPlan(std::size_t n) : n_(n) {
  if (n == 0 || !std::has_single_bit(n)) {
    throw std::invalid_argument("FFT length must be a power of two, got " + std::to_string(n));
  }
  const unsigned bits = static_cast<unsigned>(std::countr_zero(n));
  bitrev_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t r = 0;
    for (unsigned b = 0; b < bits; ++b) r |= ((i >> b) & 1U) << (bits - 1 - b);
    bitrev_[i] = r;
  }
  fwd_.reserve(n > 1 ? n - 1 : 0);
  inv_.reserve(n > 1 ? n - 1 : 0);
  for (std::size_t half = 1; half < n; half *= 2) {
    for (std::size_t j = 0; j < half; ++j) {
      const double angle = -std::numbers::pi * static_cast<double>(j) / static_cast<double>(half);
      fwd_.emplace_back(std::cos(angle), std::sin(angle));
      inv_.emplace_back(std::cos(angle), -std::sin(angle));
    }
  }
}

void FftPlan::permute(std::span<cplx> data) const {
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j = bitrev_[i];
    if (j > i) std::swap(data[i], data[j]);
  }
}

void FftPlan::run(std::span<cplx> data, const std::vector<cplx>& twiddles) const {
  if (data.size() != n_) throw std::invalid_argument("FFT input length does not match plan");
  permute(data);
  const auto& k = simd::kernels();
  for (std::size_t half = 1; half < n_; half *= 2) {
    k.butterfly_stage(data.data(), n_, half, twiddles.data() + (half - 1));
  }
}

void FftPlan::forward(std::span<cplx> data) const { run(data, fwd_); }

void FftPlan::inverse(std::span<cplx> data) const {
  run(data, inv_);
  simd::kernels().scale_real(data.data(), 1.0 / static_cast<double>(n_), n_);
}

void FftPlan::forward_columns(std::span<cplx> block, std::size_t cols) const {
  if (block.size() != n_ * cols) throw std::invalid_argument("column FFT block has wrong size");
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j = bitrev_[i];
    if (j > i) {
      std::swap_ranges(block.begin() + i * cols, block.begin() + (i + 1) * cols,
                       block.begin() + j * cols);
    }
  }
  const auto& k = simd::kernels();
  for (std::size_t half = 1; half < n_; half *= 2) {
    const cplx* tw = fwd_.data() + (half - 1);
    for (std::size_t start = 0; start < n_; start += 2 * half) {
      for (std::size_t j = 0; j < half; ++j) {
        k.butterfly_rows(block.data() + (start + j) * cols, block.data() + (start + j + half) * cols,
                         tw[j], cols);
      }
    }
  }
}

const FftPlan& fft_plan(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

std::vector<cplx> rfft_padded(std::span<const double> x, std::size_t nfft) {
  if (x.size() > nfft) throw std::invalid_argument("rfft_padded: input longer than nfft");
  std::vector<cplx> buf(nfft);
  for (std::size_t i = 0; i < x.size(); ++i) buf[i] = x[i];
  fft_plan(nfft).forward(buf);
  return buf;
}

}  // namespace mdv::dsp
