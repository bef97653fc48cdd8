// SPDX-License-Identifier: Apache-2.0
//
// Scalar kernel bodies, included by both the scalar and the AVX2 translation
// units. The AVX2 kernels reuse these exact loops for their remainders, so a
// tail element goes through the same instruction sequence on every backend.

#include <cmath>
#include <cstddef>

namespace abps::kernels::detail {

inline double dot_tail(double acc, const double* x, const double* y,
                       std::size_t i, std::size_t n) {
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

inline double dot_body(const double* x, const double* y, std::size_t n) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 += x[i] * y[i];
    a1 += x[i + 1] * y[i + 1];
    a2 += x[i + 2] * y[i + 2];
    a3 += x[i + 3] * y[i + 3];
  }
  return dot_tail((a0 + a1) + (a2 + a3), x, y, i, n);
}

inline void axpy_body(double* y, double a, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

inline void relu_body(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = (x[i] > 0.0) ? x[i] : 0.0;
}

inline void relu_backward_body(double* grad, const double* pre, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) grad[i] = (pre[i] > 0.0) ? grad[i] : 0.0;
}

inline void adam_body(double* w, double* m, double* v, const double* g,
                      std::size_t n, double lr, double beta1, double beta2,
                      double eps, double bias1, double bias2) {
  const double omb1 = 1.0 - beta1;
  const double omb2 = 1.0 - beta2;
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + omb1 * g[i];
    v[i] = beta2 * v[i] + omb2 * (g[i] * g[i]);
    const double mhat = m[i] / bias1;
    const double vhat = v[i] / bias2;
    const double denom = std::sqrt(vhat) + eps;
    w[i] = w[i] - lr * (mhat / denom);
  }
}

}  // namespace abps::kernels::detail
