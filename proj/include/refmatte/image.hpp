// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace refmatte {

/// Row-major, channel-interleaved float raster. Samples are nominally in [0,1].
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
  std::size_t size() const { return data_.size(); }

  float& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  float at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }
  std::span<float> row(int y);
  std::span<const float> row(int y) const;

  bool same_shape(const ImageBuffer& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }
  bool same_size(int width, int height) const { return width_ == width && height_ == height; }

  void fill(float value);
  void clamp01();

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

/// Byte-level equality, so -0.0 and 0.0 differ and NaN payloads compare.
bool bit_equal(const ImageBuffer& a, const ImageBuffer& b);

/// Per-pixel refractive offsets in pixels, stored as two planes plus a validity plane.
/// Invalid pixels carry (0,0).
class FlowField {
 public:
  FlowField() = default;
  FlowField(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return dx_.size(); }

  float dx(int x, int y) const { return dx_[index(x, y)]; }
  float dy(int x, int y) const { return dy_[index(x, y)]; }
  bool valid(int x, int y) const { return valid_[index(x, y)] != 0; }

  void set(int x, int y, float dx, float dy);
  void invalidate(int x, int y);

  std::span<float> dx_plane() { return dx_; }
  std::span<float> dy_plane() { return dy_; }
  std::span<std::uint8_t> valid_plane() { return valid_; }
  std::span<const float> dx_plane() const { return dx_; }
  std::span<const float> dy_plane() const { return dy_; }
  std::span<const std::uint8_t> valid_plane() const { return valid_; }

  std::size_t invalid_count() const;

 private:
  std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> dx_;
  std::vector<float> dy_;
  std::vector<std::uint8_t> valid_;
};

bool bit_equal(const FlowField& a, const FlowField& b);

/// Object mask, attenuation and refractive flow for one view of a transparent object.
/// The mask is soft (in [0,1]); binary mattes are the special case.
struct Matte {
  ImageBuffer mask;         // 1 channel
  ImageBuffer attenuation;  // 1 channel
  FlowField flow;

  Matte() = default;
  Matte(int width, int height);

  int width() const { return flow.width(); }
  int height() const { return flow.height(); }

  /// m = 0, rho = 1, zero valid flow everywhere.
  static Matte empty(int width, int height);
  /// m = 1, rho = 1, zero flow: the whole frame is object but nothing is refracted.
  static Matte identity(int width, int height);
};

bool bit_equal(const Matte& a, const Matte& b);

/// Throws std::invalid_argument if any matte invariant is violated.
void validate(const Matte& matte);

}  // namespace refmatte
