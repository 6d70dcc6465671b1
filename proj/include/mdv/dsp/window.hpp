#pragma once

#include <cstddef>
#include <vector>

namespace mdv::dsp {

/// Symmetric Hanning window, w[n] = 0.5 (1 - cos(2 pi n / (N - 1))), zero at
/// both ends. N == 1 gives {1}.
std::vector<double> hanning(std::size_t n);

}  // namespace mdv::dsp
