// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "bilinear_inl.hpp"
#include "refmatte/simd/kernels.hpp"

namespace refmatte::simd::detail {
namespace {

void warp_row_scalar(RasterView src, int y, const float* dx, const float* dy, float* out) {
  const float yf = static_cast<float>(y);
  for (int x = 0; x < src.width; ++x) {
    sample_bilinear(src, static_cast<float>(x) + dx[x], yf + dy[x], out + x * src.channels);
  }
}

void blend_row_scalar(const float* background, const float* warped, const float* mask,
                      const float* attenuation, int pixels, int channels, float* out) {
  for (int i = 0; i < pixels; ++i) {
    const float keep = 1.0f - mask[i];
    const float gain = mask[i] * attenuation[i];
    for (int k = 0; k < channels; ++k) {
      const int j = i * channels + k;
      const float v = keep * background[j] + gain * warped[j];
      out[j] = clamp_hi(clamp_lo(v, 0.0f), 1.0f);
    }
  }
}

double sum_squared_diff_scalar(const float* a, const float* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum;
}

EpeSum sum_endpoint_error_scalar(const float* ax, const float* ay, const float* bx,
                                 const float* by, const std::uint8_t* include, std::size_t n) {
  EpeSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    if (include != nullptr && include[i] == 0) continue;
    const double ex = static_cast<double>(ax[i]) - static_cast<double>(bx[i]);
    const double ey = static_cast<double>(ay[i]) - static_cast<double>(by[i]);
    acc.sum += std::sqrt(ex * ex + ey * ey);
    ++acc.count;
  }
  return acc;
}

void accumulate_gray_bit_scalar(const float* observed, const float* reference,
                                const float* contrast, float epsilon, std::size_t n,
                                std::uint32_t* codes, std::uint8_t* ambiguous) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t bit = observed[i] > reference[i] ? 1u : 0u;
    codes[i] = (codes[i] << 1) | bit;
    if (std::fabs(observed[i] - reference[i]) <= epsilon * contrast[i]) ambiguous[i] = 1;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{
      Backend::Scalar,          warp_row_scalar,           blend_row_scalar,
      sum_squared_diff_scalar,  sum_endpoint_error_scalar, accumulate_gray_bit_scalar,
  };
  return table;
}

}  // namespace refmatte::simd::detail
