// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include "refmatte/composite.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "../simd/bilinear_inl.hpp"
#include "refmatte/simd/kernels.hpp"

namespace refmatte {
namespace {

simd::RasterView view_of(const ImageBuffer& image) {
  return {image.data().data(), image.width(), image.height(), image.channels()};
}

void require_same_size(const ImageBuffer& image, int width, int height, const char* what) {
  if (!image.same_size(width, height)) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

}  // namespace

std::vector<float> bilinear_sample(const ImageBuffer& image, double x, double y) {
  if (image.empty()) throw std::invalid_argument("bilinear_sample: empty image");
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw std::invalid_argument("bilinear_sample: non-finite coordinate");
  }
  std::vector<float> out(image.channels());
  simd::detail::sample_bilinear(view_of(image), static_cast<float>(x), static_cast<float>(y),
                                out.data());
  return out;
}

CompositeResult composite_refractive(const Matte& matte, const ImageBuffer& background) {
  const int w = background.width();
  const int h = background.height();
  if (background.empty() || matte.width() != w || matte.height() != h ||
      !matte.mask.same_size(w, h) || !matte.attenuation.same_size(w, h)) {
    throw std::invalid_argument("composite_refractive: matte and background sizes differ");
  }
  const auto& k = simd::kernels();
  const int c = background.channels();
  CompositeResult result{ImageBuffer(w, h, c), 0};
  std::vector<float> warped(static_cast<std::size_t>(w) * c);
  std::vector<float> dx(w);
  std::vector<float> dy(w);
  const auto src = view_of(background);
  for (int y = 0; y < h; ++y) {
    const std::size_t offset = static_cast<std::size_t>(y) * w;
    const float* mrow = matte.mask.data().data() + offset;
    const std::uint8_t* valid = matte.flow.valid_plane().data() + offset;
    std::copy_n(matte.flow.dx_plane().data() + offset, w, dx.begin());
    std::copy_n(matte.flow.dy_plane().data() + offset, w, dy.begin());
    for (int x = 0; x < w; ++x) {
      if (!valid[x]) {
        dx[x] = 0.0f;
        dy[x] = 0.0f;
        if (mrow[x] > 0.0f) ++result.invalid_flow_pixels;
      }
    }
    k.warp_row(src, y, dx.data(), dy.data(), warped.data());
    k.blend_row(background.row(y).data(), warped.data(), mrow,
                matte.attenuation.data().data() + offset, w, c, result.image.row(y).data());
  }
  return result;
}

ImageBuffer composite_alpha(const ImageBuffer& foreground, const ImageBuffer& background,
                            const ImageBuffer& alpha) {
  if (!foreground.same_shape(background) || alpha.channels() != 1) {
    throw std::invalid_argument("composite_alpha: foreground/background shape mismatch");
  }
  require_same_size(alpha, foreground.width(), foreground.height(), "composite_alpha");
  ImageBuffer out(foreground.width(), foreground.height(), foreground.channels());
  const int c = foreground.channels();
  const auto f = foreground.data();
  const auto b = background.data();
  const auto a = alpha.data();
  auto o = out.data();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const float keep = 1.0f - a[i];
    for (int k = 0; k < c; ++k) {
      const std::size_t j = i * c + k;
      o[j] = std::clamp(f[j] + keep * b[j], 0.0f, 1.0f);
    }
  }
  return out;
}

ImageBuffer warp_by_flow(const ImageBuffer& image, const FlowField& flow) {
  const int w = image.width();
  const int h = image.height();
  if (image.empty() || flow.width() != w || flow.height() != h) {
    throw std::invalid_argument("warp_by_flow: flow and image sizes differ");
  }
  const auto& k = simd::kernels();
  ImageBuffer out(w, h, image.channels());
  std::vector<float> dx(w);
  std::vector<float> dy(w);
  const auto src = view_of(image);
  for (int y = 0; y < h; ++y) {
    const std::size_t offset = static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      const bool ok = flow.valid_plane()[offset + x] != 0;
      dx[x] = ok ? flow.dx_plane()[offset + x] : 0.0f;
      dy[x] = ok ? flow.dy_plane()[offset + x] : 0.0f;
    }
    k.warp_row(src, y, dx.data(), dy.data(), out.row(y).data());
  }
  return out;
}

ImageBuffer resize_bilinear(const ImageBuffer& image, int width, int height) {
  if (image.empty()) throw std::invalid_argument("resize_bilinear: empty image");
  if (image.same_size(width, height)) return image;
  ImageBuffer out(width, height, image.channels());
  const auto src = view_of(image);
  const double sx = static_cast<double>(image.width()) / width;
  const double sy = static_cast<double>(image.height()) / height;
  for (int y = 0; y < height; ++y) {
    const auto fy = static_cast<float>((y + 0.5) * sy - 0.5);
    float* row = out.row(y).data();
    for (int x = 0; x < width; ++x) {
      const auto fx = static_cast<float>((x + 0.5) * sx - 0.5);
      simd::detail::sample_bilinear(src, fx, fy, row + x * image.channels());
    }
  }
  return out;
}

}  // namespace refmatte
