// SPDX-License-Identifier: Apache-2.0
//
// Hand-vectorized AVX2 variants. Each vector lane replays one of the four
// scalar accumulators (see kernels_common.inl), additions happen in the same
// order, and the build keeps FMA contraction off, so outputs are bit-identical
// to the scalar backend. Compiled with -mavx2 on x86-64 only; execution is
// gated behind avx2_supported().

#include "kernels_internal.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

#include "kernels_common.inl"

namespace abps::kernels {
namespace {

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d vy = _mm256_loadu_pd(y + i);
    acc = _mm256_add_pd(acc, _mm256_mul_pd(vx, vy));
  }
  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  return detail::dot_tail((lane[0] + lane[1]) + (lane[2] + lane[3]), x, y, i, n);
}

void axpy_avx2(double* y, double a, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vy = _mm256_loadu_pd(y + i);
    const __m256d vx = _mm256_loadu_pd(x + i);
    _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(va, vx)));
  }
  detail::axpy_body(y + i, a, x + i, n - i);
}

void matvec_avx2(double* out, const double* w, const double* x, const double* b,
                 std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = dot_avx2(w + r * cols, x, cols) + b[r];
  }
}

void relu_avx2(double* x, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vx = _mm256_loadu_pd(x + i);
    const __m256d mask = _mm256_cmp_pd(vx, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(x + i, _mm256_and_pd(vx, mask));
  }
  detail::relu_body(x + i, n - i);
}

void relu_backward_avx2(double* grad, const double* pre, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vp = _mm256_loadu_pd(pre + i);
    const __m256d vg = _mm256_loadu_pd(grad + i);
    const __m256d mask = _mm256_cmp_pd(vp, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(grad + i, _mm256_and_pd(vg, mask));
  }
  detail::relu_backward_body(grad + i, pre + i, n - i);
}

void adam_avx2(double* w, double* m, double* v, const double* g, std::size_t n,
               double lr, double beta1, double beta2, double eps,
               double bias1, double bias2) {
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vomb1 = _mm256_set1_pd(1.0 - beta1);
  const __m256d vomb2 = _mm256_set1_pd(1.0 - beta2);
  const __m256d vlr = _mm256_set1_pd(lr);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vbias1 = _mm256_set1_pd(bias1);
  const __m256d vbias2 = _mm256_set1_pd(bias2);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vg = _mm256_loadu_pd(g + i);
    __m256d vm = _mm256_loadu_pd(m + i);
    __m256d vv = _mm256_loadu_pd(v + i);
    vm = _mm256_add_pd(_mm256_mul_pd(vb1, vm), _mm256_mul_pd(vomb1, vg));
    vv = _mm256_add_pd(_mm256_mul_pd(vb2, vv),
                       _mm256_mul_pd(vomb2, _mm256_mul_pd(vg, vg)));
    _mm256_storeu_pd(m + i, vm);
    _mm256_storeu_pd(v + i, vv);
    const __m256d mhat = _mm256_div_pd(vm, vbias1);
    const __m256d vhat = _mm256_div_pd(vv, vbias2);
    const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), veps);
    const __m256d vw = _mm256_loadu_pd(w + i);
    _mm256_storeu_pd(
        w + i, _mm256_sub_pd(vw, _mm256_mul_pd(vlr, _mm256_div_pd(mhat, denom))));
  }
  detail::adam_body(w + i, m + i, v + i, g + i, n - i, lr, beta1, beta2, eps,
                    bias1, bias2);
}

const Kernels kAvx2Table{
    dot_avx2,  axpy_avx2,          matvec_avx2,
    relu_avx2, relu_backward_avx2, adam_avx2,
};

}  // namespace

namespace detail {
const Kernels* avx2_table() { return &kAvx2Table; }
}  // namespace detail

}  // namespace abps::kernels

#else  // non-x86 build or AVX2 not enabled for this TU

namespace abps::kernels::detail {
const Kernels* avx2_table() { return nullptr; }
}  // namespace abps::kernels::detail

#endif
