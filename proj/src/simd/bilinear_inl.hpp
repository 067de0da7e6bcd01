// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Reference bilinear sampler shared by the scalar kernels and the public API.
// The ternary clamps mirror _mm256_max_ps/_mm256_min_ps operand order so the
// AVX2 path rounds identically.

#include <cmath>

#include "refmatte/simd/kernels.hpp"

namespace refmatte::simd::detail {

inline float clamp_lo(float v, float lo) { return v > lo ? v : lo; }
inline float clamp_hi(float v, float hi) { return v < hi ? v : hi; }
inline float min2(float a, float b) { return a < b ? a : b; }
inline float max2(float a, float b) { return a > b ? a : b; }

inline void sample_bilinear(const RasterView& src, float x, float y, float* out) {
  const int c = src.channels;
  x = clamp_hi(clamp_lo(x, 0.0f), static_cast<float>(src.width - 1));
  y = clamp_hi(clamp_lo(y, 0.0f), static_cast<float>(src.height - 1));
  const float x0f = std::floor(x);
  const float y0f = std::floor(y);
  const float fx = x - x0f;
  const float fy = y - y0f;
  const float gx = 1.0f - fx;
  const float gy = 1.0f - fy;
  const int x0 = static_cast<int>(x0f);
  const int y0 = static_cast<int>(y0f);
  const int x1 = x0 + 1 < src.width - 1 ? x0 + 1 : src.width - 1;
  const int y1 = y0 + 1 < src.height - 1 ? y0 + 1 : src.height - 1;
  const float* r0 = src.data + static_cast<long>(y0) * src.width * c;
  const float* r1 = src.data + static_cast<long>(y1) * src.width * c;
  for (int k = 0; k < c; ++k) {
    const float v00 = r0[x0 * c + k];
    const float v10 = r0[x1 * c + k];
    const float v01 = r1[x0 * c + k];
    const float v11 = r1[x1 * c + k];
    const float top = v00 * gx + v10 * fx;
    const float bottom = v01 * gx + v11 * fx;
    float v = top * gy + bottom * fy;
    const float lo = min2(min2(v00, v10), min2(v01, v11));
    const float hi = max2(max2(v00, v10), max2(v01, v11));
    out[k] = clamp_hi(clamp_lo(v, lo), hi);
  }
}

}  // namespace refmatte::simd::detail
