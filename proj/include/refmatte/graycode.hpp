// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "refmatte/image.hpp"
#include "refmatte/render/scene.hpp"

namespace refmatte::graycode {

/// Reflected binary Gray code.
constexpr std::uint32_t gray_encode(std::uint32_t n) { return n ^ (n >> 1); }

constexpr std::uint32_t gray_decode(std::uint32_t g) {
  g ^= g >> 16;
  g ^= g >> 8;
  g ^= g >> 4;
  g ^= g >> 2;
  g ^= g >> 1;
  return g;
}

/// ceil(log2(extent)), at least 1.
int bits_for(int extent);

enum class Axis { X, Y };

/// Binary stripe patterns: x bit-planes MSB first, then y bit-planes MSB first.
/// With complements, each pattern is immediately followed by its inverse.
struct PatternStack {
  int width = 0;
  int height = 0;
  int bits_x = 0;
  int bits_y = 0;
  bool complements = true;
  std::vector<ImageBuffer> patterns;  // single-channel, values in {0, 1}

  std::size_t plane_count() const { return static_cast<std::size_t>(bits_x + bits_y); }
  std::size_t pattern_count() const { return plane_count() * (complements ? 2 : 1); }
  /// Index into patterns of bit-plane `plane` (0 = x MSB) or of its complement.
  std::size_t index_of(std::size_t plane, bool complement) const {
    return complements ? 2 * plane + (complement ? 1 : 0) : plane;
  }
};

/// Throws std::invalid_argument when width or height is below 2.
PatternStack generate_pattern_stack(int width, int height, bool with_complements = true);

/// Observations of one scene in front of: a black background with the object
/// drawn white (the coverage image), a white background, and each pattern.
struct CaptureStack {
  ImageBuffer black;
  ImageBuffer white;
  std::vector<ImageBuffer> patterns;  // PatternStack order
  int bits_x = 0;
  int bits_y = 0;
  bool complements = true;

  int width() const { return white.width(); }
  int height() const { return white.height(); }
};

struct ExtractOptions {
  /// Mask = black capture above this level.
  float mask_threshold = 0.5f;
  /// A bit is ambiguous when |observed - reference| <= ambiguity * white.
  float ambiguity = 1e-3f;
};

/// Recover mask, attenuation and integer-quantized flow from a capture stack.
/// Ambiguous or out-of-range codes inside the mask are flagged invalid.
/// Throws std::invalid_argument on size or pattern-count mismatch.
Matte extract_matte(const CaptureStack& stack, const ExtractOptions& options = {});

/// Render the capture stack of a scene with the analytic renderer.
CaptureStack render_capture_stack(const render::Scene& scene, const PatternStack& patterns);

/// Capture stack of a whole-frame "object" that only displaces the background
/// by the given flow: every pattern is backward-warped; black and white are 1.
CaptureStack warp_capture_stack(const PatternStack& patterns, const FlowField& flow);

}  // namespace refmatte::graycode
