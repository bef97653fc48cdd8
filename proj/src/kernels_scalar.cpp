// SPDX-License-Identifier: Apache-2.0
#include "abps/kernels.hpp"

#include "kernels_common.inl"

namespace abps::kernels {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  return detail::dot_body(x, y, n);
}

void axpy_scalar(double* y, double a, const double* x, std::size_t n) {
  detail::axpy_body(y, a, x, n);
}

void matvec_scalar(double* out, const double* w, const double* x, const double* b,
                   std::size_t rows, std::size_t cols) {
  for (std::size_t r = 0; r < rows; ++r) {
    out[r] = detail::dot_body(w + r * cols, x, cols) + b[r];
  }
}

void relu_scalar(double* x, std::size_t n) { detail::relu_body(x, n); }

void relu_backward_scalar(double* grad, const double* pre, std::size_t n) {
  detail::relu_backward_body(grad, pre, n);
}

void adam_scalar(double* w, double* m, double* v, const double* g, std::size_t n,
                 double lr, double beta1, double beta2, double eps,
                 double bias1, double bias2) {
  detail::adam_body(w, m, v, g, n, lr, beta1, beta2, eps, bias1, bias2);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels table{
      dot_scalar,   axpy_scalar,          matvec_scalar,
      relu_scalar,  relu_backward_scalar, adam_scalar,
  };
  return table;
}

}  // namespace abps::kernels
