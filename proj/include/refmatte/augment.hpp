// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Flow-consistent augmentation. Every transform acts on the input image, the
// background and the matte together so that compositing the transformed matte
// onto the transformed background still explains the transformed input.

#include <cstdint>
#include <string>

#include "refmatte/image.hpp"

namespace refmatte {

struct Sample {
  ImageBuffer input;
  ImageBuffer background;
  Matte matte;
  std::uint64_t seed = 0;
  std::string scene_id;

  int width() const { return input.width(); }
  int height() const { return input.height(); }
};

/// Throws std::invalid_argument when members differ in size or the matte is invalid.
void validate(const Sample& sample);
bool bit_equal(const Sample& a, const Sample& b);

inline constexpr double kMaxColorDelta = 0.2;
inline constexpr double kMinScale = 0.875;
inline constexpr double kMaxScale = 1.05;
inline constexpr double kMaxNoise = 0.05;

struct ColorJitter {
  double brightness = 0.0;  // added
  double contrast = 0.0;    // gain 1 + c about 0.5
  double saturation = 0.0;  // gain 1 + s away from luma
};

struct AugmentConfig {
  double color_range = 0.2;
  double scale_min = 0.875;
  double scale_max = 1.05;
  double noise_amplitude = 0.05;
  double flip_horizontal_probability = 0.5;
  double flip_vertical_probability = 0.5;
  int crop_size = 448;  // 0 keeps the full frame
  bool blur = true;
  double blur_radius = 1.5;
  std::uint64_t seed = 0;
};

void validate(const AugmentConfig& config);

Sample flip_horizontal(const Sample& sample);
Sample flip_vertical(const Sample& sample);

/// Deltas must lie in [-0.2, 0.2]. Applies to input and background alike.
Sample jitter_color(const Sample& sample, const ColorJitter& jitter);

/// Uniform noise in [-amplitude, amplitude] on the input only; amplitude <= 0.05.
Sample add_noise(const Sample& sample, double amplitude, std::uint64_t seed);

/// Resamples every member to round(factor * size). Flow is rescaled by the
/// realized per-axis size ratio, which equals factor up to that rounding.
/// A resampled flow entry is valid only if all four source neighbours are.
/// Throws if the result would be smaller than min_size on either axis.
Sample scale_sample(const Sample& sample, double factor, int min_size = 0);

/// Softens the mask in a band of ceil(radius) pixels around the object outline
/// with a truncated Gaussian (sigma = radius / 2), extends attenuation and flow
/// into the band from the object side, and adds the resulting change in the
/// composite to the input inside the band.
Sample blur_boundary(const Sample& sample, double radius);

/// Cuts the same size x size window from every member; flow values are kept.
Sample random_crop(const Sample& sample, int size, std::uint64_t seed);
Sample crop(const Sample& sample, int x0, int y0, int width, int height);

/// Applies color, scale, noise, flips, blur and crop in that order, with every
/// random draw derived from (config.seed, sample.seed).
Sample augment(const Sample& sample, const AugmentConfig& config);

}  // namespace refmatte
