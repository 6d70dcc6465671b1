#include "mdv/dsp/window.hpp"

#include <cmath>
#include <numbers>

namespace mdv::dsp {

std::vector<double> hanning(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n <= 1) return w;
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom));
  }
  // Exact symmetry; cos() is not perfectly symmetric in floating point.
  for (std::size_t i = 0; i < n / 2; ++i) w[n - 1 - i] = w[i];
  return w;
}

}  // namespace mdv::dsp
