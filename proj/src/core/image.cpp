// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include "refmatte/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace refmatte {

ImageBuffer::ImageBuffer(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("ImageBuffer: dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw std::invalid_argument("ImageBuffer: channels must be 1 or 3, got " +
                                std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

std::span<float> ImageBuffer::row(int y) {
  const std::size_t stride = static_cast<std::size_t>(width_) * channels_;
  return std::span<float>(data_).subspan(y * stride, stride);
}

std::span<const float> ImageBuffer::row(int y) const {
  const std::size_t stride = static_cast<std::size_t>(width_) * channels_;
  return std::span<const float>(data_).subspan(y * stride, stride);
}

void ImageBuffer::fill(float value) { std::fill(data_.begin(), data_.end(), value); }

void ImageBuffer::clamp01() {
  for (float& v : data_) v = std::clamp(v, 0.0f, 1.0f);
}

bool bit_equal(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.same_shape(b)) return false;
  return a.size() == 0 ||
         std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0;
}

FlowField::FlowField(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("FlowField: dimensions must be positive");
  }
  const std::size_t n = static_cast<std::size_t>(width) * height;
  dx_.assign(n, 0.0f);
  dy_.assign(n, 0.0f);
  valid_.assign(n, 1);
}

void FlowField::set(int x, int y, float dx, float dy) {
  const std::size_t i = index(x, y);
  dx_[i] = dx;
  dy_[i] = dy;
  valid_[i] = 1;
}

void FlowField::invalidate(int x, int y) {
  const std::size_t i = index(x, y);
  dx_[i] = 0.0f;
  dy_[i] = 0.0f;
  valid_[i] = 0;
}

std::size_t FlowField::invalid_count() const {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{0}));
}

bool bit_equal(const FlowField& a, const FlowField& b) {
  if (a.width() != b.width() || a.height() != b.height()) return false;
  const std::size_t n = a.pixel_count();
  if (n == 0) return true;
  return std::memcmp(a.dx_plane().data(), b.dx_plane().data(), n * sizeof(float)) == 0 &&
         std::memcmp(a.dy_plane().data(), b.dy_plane().data(), n * sizeof(float)) == 0 &&
         std::equal(a.valid_plane().begin(), a.valid_plane().end(), b.valid_plane().begin());
}

Matte::Matte(int width, int height)
    : mask(width, height, 1, 0.0f), attenuation(width, height, 1, 1.0f), flow(width, height) {}

Matte Matte::empty(int width, int height) { return Matte(width, height); }

Matte Matte::identity(int width, int height) {
  Matte m(width, height);
  m.mask.fill(1.0f);
  return m;
}

bool bit_equal(const Matte& a, const Matte& b) {
  return bit_equal(a.mask, b.mask) && bit_equal(a.attenuation, b.attenuation) &&
         bit_equal(a.flow, b.flow);
}

void validate(const Matte& matte) {
  const int w = matte.flow.width();
  const int h = matte.flow.height();
  if (matte.mask.channels() != 1 || matte.attenuation.channels() != 1) {
    throw std::invalid_argument("Matte: mask and attenuation must be single-channel");
  }
  if (!matte.mask.same_size(w, h) || !matte.attenuation.same_size(w, h)) {
    throw std::invalid_argument("Matte: mask, attenuation and flow sizes differ");
  }
  for (float v : matte.mask.data()) {
    if (!(v >= 0.0f && v <= 1.0f)) throw std::invalid_argument("Matte: mask outside [0,1]");
  }
  for (float v : matte.attenuation.data()) {
    if (!(v >= 0.0f && v <= 1.0f)) {
      throw std::invalid_argument("Matte: attenuation outside [0,1]");
    }
  }
  const auto dx = matte.flow.dx_plane();
  const auto dy = matte.flow.dy_plane();
  const auto valid = matte.flow.valid_plane();
  for (std::size_t i = 0; i < dx.size(); ++i) {
    if (valid[i]) {
      if (!std::isfinite(dx[i]) || !std::isfinite(dy[i]) || std::abs(dx[i]) > w ||
          std::abs(dy[i]) > h) {
        throw std::invalid_argument("Matte: flow offset out of range at pixel " +
                                    std::to_string(i));
      }
    } else if (dx[i] != 0.0f || dy[i] != 0.0f) {
      throw std::invalid_argument("Matte: invalid flow pixel carries a nonzero offset");
    }
  }
}

}  // namespace refmatte
