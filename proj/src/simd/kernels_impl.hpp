#pragma once

#include "wwlab/simd/kernels.hpp"

namespace wwlab::simd::detail {

const KernelTable& scalar_table();
#if defined(WWLAB_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

}  // namespace wwlab::simd::detail
