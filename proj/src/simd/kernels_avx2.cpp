// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0

// AVX2 variants of the per-pixel kernels. This translation unit is compiled
// with -mavx2 and must only be entered after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "bilinear_inl.hpp"
#include "refmatte/simd/kernels.hpp"

namespace refmatte::simd::detail {
namespace {

constexpr int kLanes = 8;

void warp_row_avx2(RasterView src, int y, const float* dx, const float* dy, float* out) {
  const int w = src.width;
  const int c = src.channels;
  const __m256 zero = _mm256_setzero_ps();
  const __m256 one = _mm256_set1_ps(1.0f);
  const __m256 xmax = _mm256_set1_ps(static_cast<float>(w - 1));
  const __m256 ymax = _mm256_set1_ps(static_cast<float>(src.height - 1));
  const __m256i ilast_x = _mm256_set1_epi32(w - 1);
  const __m256i ilast_y = _mm256_set1_epi32(src.height - 1);
  const __m256i ione = _mm256_set1_epi32(1);
  const __m256i row_stride = _mm256_set1_epi32(w * c);
  const __m256i chan = _mm256_set1_epi32(c);
  const __m256i lane_offsets = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
  const __m256 yf = _mm256_set1_ps(static_cast<float>(y));

  alignas(32) float tmp[3][kLanes];
  int x = 0;
  for (; x + kLanes <= w; x += kLanes) {
    const __m256 base_x = _mm256_cvtepi32_ps(_mm256_add_epi32(_mm256_set1_epi32(x), lane_offsets));
    __m256 sx = _mm256_add_ps(base_x, _mm256_loadu_ps(dx + x));
    __m256 sy = _mm256_add_ps(yf, _mm256_loadu_ps(dy + x));
    sx = _mm256_min_ps(_mm256_max_ps(sx, zero), xmax);
    sy = _mm256_min_ps(_mm256_max_ps(sy, zero), ymax);
    const __m256 x0f = _mm256_floor_ps(sx);
    const __m256 y0f = _mm256_floor_ps(sy);
    const __m256 fx = _mm256_sub_ps(sx, x0f);
    const __m256 fy = _mm256_sub_ps(sy, y0f);
    const __m256 gx = _mm256_sub_ps(one, fx);
    const __m256 gy = _mm256_sub_ps(one, fy);
    const __m256i x0 = _mm256_cvttps_epi32(x0f);
    const __m256i y0 = _mm256_cvttps_epi32(y0f);
    const __m256i x1 = _mm256_min_epi32(_mm256_add_epi32(x0, ione), ilast_x);
    const __m256i y1 = _mm256_min_epi32(_mm256_add_epi32(y0, ione), ilast_y);
    const __m256i row0 = _mm256_mullo_epi32(y0, row_stride);
    const __m256i row1 = _mm256_mullo_epi32(y1, row_stride);
    const __m256i col0 = _mm256_mullo_epi32(x0, chan);
    const __m256i col1 = _mm256_mullo_epi32(x1, chan);
    const __m256i i00 = _mm256_add_epi32(row0, col0);
    const __m256i i10 = _mm256_add_epi32(row0, col1);
    const __m256i i01 = _mm256_add_epi32(row1, col0);
    const __m256i i11 = _mm256_add_epi32(row1, col1);
    for (int k = 0; k < c; ++k) {
      const float* base = src.data + k;
      const __m256 v00 = _mm256_i32gather_ps(base, i00, 4);
      const __m256 v10 = _mm256_i32gather_ps(base, i10, 4);
      const __m256 v01 = _mm256_i32gather_ps(base, i01, 4);
      const __m256 v11 = _mm256_i32gather_ps(base, i11, 4);
      const __m256 top = _mm256_add_ps(_mm256_mul_ps(v00, gx), _mm256_mul_ps(v10, fx));
      const __m256 bottom = _mm256_add_ps(_mm256_mul_ps(v01, gx), _mm256_mul_ps(v11, fx));
      __m256 v = _mm256_add_ps(_mm256_mul_ps(top, gy), _mm256_mul_ps(bottom, fy));
      const __m256 lo = _mm256_min_ps(_mm256_min_ps(v00, v10), _mm256_min_ps(v01, v11));
      const __m256 hi = _mm256_max_ps(_mm256_max_ps(v00, v10), _mm256_max_ps(v01, v11));
      v = _mm256_min_ps(_mm256_max_ps(v, lo), hi);
      if (c == 1) {
        _mm256_storeu_ps(out + x, v);
      } else {
        _mm256_store_ps(tmp[k], v);
      }
    }
    if (c != 1) {
      for (int l = 0; l < kLanes; ++l) {
        for (int k = 0; k < c; ++k) out[(x + l) * c + k] = tmp[k][l];
      }
    }
  }
  const float yrow = static_cast<float>(y);
  for (; x < w; ++x) {
    sample_bilinear(src, static_cast<float>(x) + dx[x], yrow + dy[x], out + x * c);
  }
}

inline __m256 blend8(__m256 bg, __m256 warped, __m256 m, __m256 rho) {
  const __m256 keep = _mm256_sub_ps(_mm256_set1_ps(1.0f), m);
  const __m256 gain = _mm256_mul_ps(m, rho);
  const __m256 v = _mm256_add_ps(_mm256_mul_ps(keep, bg), _mm256_mul_ps(gain, warped));
  return _mm256_min_ps(_mm256_max_ps(v, _mm256_setzero_ps()), _mm256_set1_ps(1.0f));
}

void blend_row_avx2(const float* background, const float* warped, const float* mask,
                    const float* attenuation, int pixels, int channels, float* out) {
  int i = 0;
  if (channels == 1) {
    for (; i + kLanes <= pixels; i += kLanes) {
      _mm256_storeu_ps(out + i, blend8(_mm256_loadu_ps(background + i), _mm256_loadu_ps(warped + i),
                                       _mm256_loadu_ps(mask + i), _mm256_loadu_ps(attenuation + i)));
    }
  } else if (channels == 3) {
    // 8 pixels = 24 interleaved samples; spread per-pixel m and rho over three vectors.
    const __m256i spread0 = _mm256_setr_epi32(0, 0, 0, 1, 1, 1, 2, 2);
    const __m256i spread1 = _mm256_setr_epi32(2, 3, 3, 3, 4, 4, 4, 5);
    const __m256i spread2 = _mm256_setr_epi32(5, 5, 6, 6, 6, 7, 7, 7);
    for (; i + kLanes <= pixels; i += kLanes) {
      const __m256 m = _mm256_loadu_ps(mask + i);
      const __m256 r = _mm256_loadu_ps(attenuation + i);
      const int j = i * 3;
      _mm256_storeu_ps(out + j, blend8(_mm256_loadu_ps(background + j), _mm256_loadu_ps(warped + j),
                                       _mm256_permutevar8x32_ps(m, spread0),
                                       _mm256_permutevar8x32_ps(r, spread0)));
      _mm256_storeu_ps(out + j + 8,
                       blend8(_mm256_loadu_ps(background + j + 8), _mm256_loadu_ps(warped + j + 8),
                              _mm256_permutevar8x32_ps(m, spread1),
                              _mm256_permutevar8x32_ps(r, spread1)));
      _mm256_storeu_ps(out + j + 16,
                       blend8(_mm256_loadu_ps(background + j + 16), _mm256_loadu_ps(warped + j + 16),
                              _mm256_permutevar8x32_ps(m, spread2),
                              _mm256_permutevar8x32_ps(r, spread2)));
    }
  }
  if (i < pixels) {
    const int done = i * channels;
    scalar_table().blend_row(background + done, warped + done, mask + i, attenuation + i,
                             pixels - i, channels, out + done);
  }
}

inline double horizontal_sum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double sum_squared_diff_avx2(const float* a, const float* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256 va = _mm256_loadu_ps(a + i);
    const __m256 vb = _mm256_loadu_ps(b + i);
    const __m256d d0 = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_castps256_ps128(va)),
                                     _mm256_cvtps_pd(_mm256_castps256_ps128(vb)));
    const __m256d d1 = _mm256_sub_pd(_mm256_cvtps_pd(_mm256_extractf128_ps(va, 1)),
                                     _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1)));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
  }
  double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return sum;
}

EpeSum sum_endpoint_error_avx2(const float* ax, const float* ay, const float* bx, const float* by,
                               const std::uint8_t* include, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t count = 0;
  std::size_t i = 0;
  constexpr std::size_t kQuad = 4;
  for (; i + kQuad <= n; i += kQuad) {
    const __m256d ex = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(ax + i)),
                                     _mm256_cvtps_pd(_mm_loadu_ps(bx + i)));
    const __m256d ey = _mm256_sub_pd(_mm256_cvtps_pd(_mm_loadu_ps(ay + i)),
                                     _mm256_cvtps_pd(_mm_loadu_ps(by + i)));
    __m256d len = _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey)));
    if (include != nullptr) {
      const __m256i keep = _mm256_setr_epi64x(include[i] ? -1 : 0, include[i + 1] ? -1 : 0,
                                              include[i + 2] ? -1 : 0, include[i + 3] ? -1 : 0);
      len = _mm256_and_pd(len, _mm256_castsi256_pd(keep));
      count += (include[i] != 0) + (include[i + 1] != 0) + (include[i + 2] != 0) +
               (include[i + 3] != 0);
    } else {
      count += kQuad;
    }
    acc = _mm256_add_pd(acc, len);
  }
  EpeSum result{horizontal_sum(acc), count};
  const EpeSum tail = scalar_table().sum_endpoint_error(
      ax + i, ay + i, bx + i, by + i, include != nullptr ? include + i : nullptr, n - i);
  result.sum += tail.sum;
  result.count += tail.count;
  return result;
}

void accumulate_gray_bit_avx2(const float* observed, const float* reference, const float* contrast,
                              float epsilon, std::size_t n, std::uint32_t* codes,
                              std::uint8_t* ambiguous) {
  const __m256 sign = _mm256_set1_ps(-0.0f);
  const __m256 eps = _mm256_set1_ps(epsilon);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256 obs = _mm256_loadu_ps(observed + i);
    const __m256 ref = _mm256_loadu_ps(reference + i);
    const __m256 above = _mm256_cmp_ps(obs, ref, _CMP_GT_OQ);
    const __m256 gap = _mm256_andnot_ps(sign, _mm256_sub_ps(obs, ref));
    const __m256 tie =
        _mm256_cmp_ps(gap, _mm256_mul_ps(eps, _mm256_loadu_ps(contrast + i)), _CMP_LE_OQ);
    auto* code_ptr = reinterpret_cast<__m256i*>(codes + i);
    const __m256i bit = _mm256_srli_epi32(_mm256_castps_si256(above), 31);
    _mm256_storeu_si256(code_ptr,
                        _mm256_or_si256(_mm256_slli_epi32(_mm256_loadu_si256(code_ptr), 1), bit));
    const int ties = _mm256_movemask_ps(tie);
    if (ties != 0) {
      for (int l = 0; l < kLanes; ++l) {
        if ((ties >> l) & 1) ambiguous[i + l] = 1;
      }
    }
  }
  if (i < n) {
    scalar_table().accumulate_gray_bit(observed + i, reference + i, contrast + i, epsilon, n - i,
                                       codes + i, ambiguous + i);
  }
}

}  // namespace

const KernelTable* avx2_table() {
  static const KernelTable table{
      Backend::Avx2,         warp_row_avx2,           blend_row_avx2,
      sum_squared_diff_avx2, sum_endpoint_error_avx2, accumulate_gray_bit_avx2,
  };
  return &table;
}

}  // namespace refmatte::simd::detail
