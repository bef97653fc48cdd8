// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <string_view>

#include "abps/error.hpp"
#include "abps/kernels.hpp"
#include "kernels_internal.hpp"

namespace abps::kernels {
namespace {

struct Active {
  const Kernels* table;
  Backend backend;
};

Backend detect_backend() {
  if (const char* env = std::getenv("ABPS_KERNELS")) {
    const std::string_view value(env);
    if (value == "scalar") return Backend::kScalar;
    if (value == "avx2") {
      require(avx2_supported(), "ABPS_KERNELS=avx2 but AVX2 is unavailable");
      return Backend::kAvx2;
    }
    fail("unknown ABPS_KERNELS value '", value, "' (expected scalar or avx2)");
  }
  return avx2_supported() ? Backend::kAvx2 : Backend::kScalar;
}

Active& active_state() {
  static Active state = [] {
    const Backend b = detect_backend();
    const Kernels* t = b == Backend::kAvx2 ? avx2_kernels() : &scalar_kernels();
    return Active{t, b};
  }();
  return state;
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__)
  return detail::avx2_table() != nullptr && __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Kernels* avx2_kernels() {
  return avx2_supported() ? detail::avx2_table() : nullptr;
}

const Kernels& active() { return *active_state().table; }

Backend active_backend() { return active_state().backend; }

void set_backend(Backend b) {
  if (b == Backend::kAvx2) {
    require(avx2_supported(), "AVX2 kernels unavailable on this machine");
    active_state() = {avx2_kernels(), b};
  } else {
    active_state() = {&scalar_kernels(), b};
  }
}

const char* backend_name(Backend b) {
  return b == Backend::kAvx2 ? "avx2" : "scalar";
}

}  // namespace abps::kernels
