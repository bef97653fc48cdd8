// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "abps/kernels.hpp"

namespace abps::kernels::detail {

/// AVX2 table from the -mavx2 translation unit; nullptr on non-x86 builds.
/// Callers must gate actual use on avx2_supported().
const Kernels* avx2_table();

}  // namespace abps::kernels::detail
