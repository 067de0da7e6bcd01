// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-pixel inner loops. Every kernel has a scalar reference implementation and,
// where the CPU allows, a vectorized variant. The variant is selected once at
// startup (override with REFMATTE_SIMD=scalar|avx2) and must agree with the
// reference: bit-exactly for elementwise kernels, to rounding for reductions.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace refmatte::simd {

enum class Backend { Scalar, Avx2 };

struct RasterView {
  const float* data = nullptr;
  int width = 0;
  int height = 0;
  int channels = 0;
};

struct EpeSum {
  double sum = 0.0;
  std::size_t count = 0;
};

struct KernelTable {
  Backend backend;

  // out[x*c + k] = bilinear(src, x + dx[x], y + dy[x]) for one output row of
  // src.width pixels. Coordinates clamp to the border; each result is clamped
  // to the range of its four neighbours.
  void (*warp_row)(RasterView src, int y, const float* dx, const float* dy, float* out);

  // out = clamp01((1 - m) * background + (m * rho) * warped), channel-expanded.
  void (*blend_row)(const float* background, const float* warped, const float* mask,
                    const float* attenuation, int pixels, int channels, float* out);

  double (*sum_squared_diff)(const float* a, const float* b, std::size_t n);

  // Sum of |(ax,ay) - (bx,by)| over entries with include[i] != 0 (all if include is null).
  EpeSum (*sum_endpoint_error)(const float* ax, const float* ay, const float* bx,
                               const float* by, const std::uint8_t* include, std::size_t n);

  // codes[i] = (codes[i] << 1) | (observed[i] > reference[i]);
  // ambiguous[i] |= |observed[i] - reference[i]| <= epsilon * contrast[i].
  void (*accumulate_gray_bit)(const float* observed, const float* reference,
                              const float* contrast, float epsilon, std::size_t n,
                              std::uint32_t* codes, std::uint8_t* ambiguous);
};

const KernelTable& kernels();
Backend active_backend();
bool backend_supported(Backend backend);
/// Throws std::invalid_argument when the backend is not available on this CPU/build.
void set_backend(Backend backend);
/// nullptr when unsupported.
const KernelTable* kernels_for(Backend backend);
std::string_view backend_name(Backend backend);

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr if not compiled in
}  // namespace detail

}  // namespace refmatte::simd
