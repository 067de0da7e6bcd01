// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "refmatte/simd/kernels.hpp"

namespace refmatte::simd {

#ifndef REFMATTE_HAVE_AVX2
namespace detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace detail
#endif

namespace {

bool cpu_has_avx2() {
#if defined(REFMATTE_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* env = std::getenv("REFMATTE_SIMD");
  const std::string_view wanted = env != nullptr ? env : "";
  if (wanted == "scalar") return &detail::scalar_table();
  if (const KernelTable* avx2 = kernels_for(Backend::Avx2)) return avx2;
  return &detail::scalar_table();
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable* kernels_for(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return &detail::scalar_table();
    case Backend::Avx2:
      return cpu_has_avx2() ? detail::avx2_table() : nullptr;
  }
  return nullptr;
}

bool backend_supported(Backend backend) { return kernels_for(backend) != nullptr; }

const KernelTable& kernels() { return *active_slot().load(std::memory_order_acquire); }

Backend active_backend() { return kernels().backend; }

void set_backend(Backend backend) {
  const KernelTable* table = kernels_for(backend);
  if (table == nullptr) {
    throw std::invalid_argument("SIMD backend not available: " +
                                std::string(backend_name(backend)));
  }
  active_slot().store(table, std::memory_order_release);
}

std::string_view backend_name(Backend backend) {
  switch (backend) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace refmatte::simd
