#pragma once

#include "mdv/simd/kernels.hpp"

namespace mdv::simd::detail {

/// Defined in kernels_avx2.cpp when MDV_HAVE_AVX2 is set; returns the table
/// without checking the CPU.
const KernelTable* avx2_table();

}  // namespace mdv::simd::detail
