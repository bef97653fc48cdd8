// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

namespace abps::kernels {

enum class Backend { kScalar, kAvx2 };

/// Dense double-precision kernels behind the Q-network math. Every backend
/// follows the same fixed accumulation order (4 independent partial sums for
/// reductions, combined as (s0+s1)+(s2+s3), scalar tail appended last) and the
/// build disables FMA contraction, so scalar and SIMD results are
/// bit-identical. Runtime dispatch therefore never changes numerics.
struct Kernels {
  /// sum_i x[i]*y[i]
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y[i] += a * x[i]
  void (*axpy)(double* y, double a, const double* x, std::size_t n);
  /// out[r] = dot(w[r,:], x) + b[r]; w is row-major rows x cols
  void (*matvec)(double* out, const double* w, const double* x, const double* b,
                 std::size_t rows, std::size_t cols);
  /// x[i] = x[i] > 0 ? x[i] : +0.0
  void (*relu)(double* x, std::size_t n);
  /// grad[i] = pre[i] > 0 ? grad[i] : +0.0
  void (*relu_backward)(double* grad, const double* pre, std::size_t n);
  /// One Adam update over n parameters. bias1/bias2 are the step's
  /// 1-beta1^t and 1-beta2^t correction denominators.
  void (*adam_step)(double* w, double* m, double* v, const double* g, std::size_t n,
                    double lr, double beta1, double beta2, double eps,
                    double bias1, double bias2);
};

const Kernels& scalar_kernels();

/// True when AVX2 kernels were compiled in and the CPU supports them.
bool avx2_supported();
/// AVX2 table, or nullptr when unavailable.
const Kernels* avx2_kernels();

/// Currently selected table. First use auto-detects: the ABPS_KERNELS
/// environment variable ("scalar" or "avx2") wins, otherwise the fastest
/// supported backend is picked.
const Kernels& active();
Backend active_backend();
/// Force a backend (throws abps::Error when unsupported). Used by tests.
void set_backend(Backend b);

const char* backend_name(Backend b);

}  // namespace abps::kernels
