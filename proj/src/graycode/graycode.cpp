// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include "refmatte/graycode.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "refmatte/composite.hpp"
#include "refmatte/render/renderer.hpp"
#include "refmatte/simd/kernels.hpp"

namespace refmatte::graycode {
namespace {

std::vector<float> luminance(const ImageBuffer& image) {
  std::vector<float> out(image.pixel_count());
  const auto d = image.data();
  const int c = image.channels();
  if (c == 1) {
    std::copy(d.begin(), d.end(), out.begin());
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = (d[i * c] + d[i * c + 1] + d[i * c + 2]) / 3.0f;
    }
  }
  return out;
}

}  // namespace

int bits_for(int extent) {
  int bits = 1;
  while ((1LL << bits) < extent) ++bits;
  return bits;
}

PatternStack generate_pattern_stack(int width, int height, bool with_complements) {
  if (width < 2 || height < 2) {
    throw std::invalid_argument("generate_pattern_stack: width and height must be >= 2");
  }
  PatternStack stack;
  stack.width = width;
  stack.height = height;
  stack.bits_x = bits_for(width);
  stack.bits_y = bits_for(height);
  stack.complements = with_complements;
  stack.patterns.reserve(stack.pattern_count());
  auto emit = [&](Axis axis, int bit) {
    ImageBuffer p(width, height, 1);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const auto coord = static_cast<std::uint32_t>(axis == Axis::X ? x : y);
        p.at(x, y) = static_cast<float>((gray_encode(coord) >> bit) & 1u);
      }
    }
    stack.patterns.push_back(p);
    if (with_complements) {
      for (float& v : p.data()) v = 1.0f - v;
      stack.patterns.push_back(std::move(p));
    }
  };
  for (int b = stack.bits_x - 1; b >= 0; --b) emit(Axis::X, b);
  for (int b = stack.bits_y - 1; b >= 0; --b) emit(Axis::Y, b);
  return stack;
}

Matte extract_matte(const CaptureStack& stack, const ExtractOptions& options) {
  const int w = stack.white.width();
  const int h = stack.white.height();
  if (stack.white.empty() || !stack.black.same_size(w, h)) {
    throw std::invalid_argument("extract_matte: black and white captures differ in size");
  }
  if (stack.bits_x != bits_for(w) || stack.bits_y != bits_for(h)) {
    throw std::invalid_argument("extract_matte: bit counts do not match the capture size");
  }
  const std::size_t planes = static_cast<std::size_t>(stack.bits_x + stack.bits_y);
  const std::size_t expected = planes * (stack.complements ? 2 : 1);
  if (stack.patterns.size() != expected) {
    throw std::invalid_argument("extract_matte: expected " + std::to_string(expected) +
                                " pattern captures, got " + std::to_string(stack.patterns.size()));
  }
  for (const auto& p : stack.patterns) {
    if (!p.same_size(w, h)) throw std::invalid_argument("extract_matte: pattern size mismatch");
  }

  const std::size_t n = static_cast<std::size_t>(w) * h;
  const std::vector<float> black = luminance(stack.black);
  const std::vector<float> white = luminance(stack.white);
  std::vector<float> half_white(n);
  std::transform(white.begin(), white.end(), half_white.begin(), [](float v) { return 0.5f * v; });

  std::vector<std::uint32_t> code_x(n, 0u);
  std::vector<std::uint32_t> code_y(n, 0u);
  std::vector<std::uint8_t> ambiguous(n, 0);
  const auto& k = simd::kernels();
  for (std::size_t plane = 0; plane < planes; ++plane) {
    const std::vector<float> obs =
        luminance(stack.patterns[stack.complements ? 2 * plane : plane]);
    std::vector<float> reference;
    if (stack.complements) reference = luminance(stack.patterns[2 * plane + 1]);
    const float* ref = stack.complements ? reference.data() : half_white.data();
    std::uint32_t* codes = plane < static_cast<std::size_t>(stack.bits_x) ? code_x.data() : code_y.data();
    k.accumulate_gray_bit(obs.data(), ref, white.data(), options.ambiguity, n, codes,
                          ambiguous.data());
  }

  Matte matte(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (!(black[i] > options.mask_threshold)) continue;
      matte.mask.at(x, y) = 1.0f;
      matte.attenuation.at(x, y) = std::clamp(white[i], 0.0f, 1.0f);
      const std::uint32_t cx = gray_decode(code_x[i]);
      const std::uint32_t cy = gray_decode(code_y[i]);
      if (ambiguous[i] || cx >= static_cast<std::uint32_t>(w) ||
          cy >= static_cast<std::uint32_t>(h)) {
        matte.flow.invalidate(x, y);
        continue;
      }
      matte.flow.set(x, y, static_cast<float>(static_cast<int>(cx) - x),
                     static_cast<float>(static_cast<int>(cy) - y));
    }
  }
  return matte;
}

CaptureStack render_capture_stack(const render::Scene& scene, const PatternStack& patterns) {
  if (patterns.width != scene.camera.width || patterns.height != scene.camera.height) {
    throw std::invalid_argument("render_capture_stack: pattern size differs from the camera");
  }
  const render::RenderPlan plan = render::plan_render(scene);
  CaptureStack stack;
  stack.bits_x = patterns.bits_x;
  stack.bits_y = patterns.bits_y;
  stack.complements = patterns.complements;
  stack.black = render::coverage_from_plan(plan);
  stack.white = render::image_from_plan(plan, ImageBuffer(patterns.width, patterns.height, 1, 1.0f));
  stack.patterns.reserve(patterns.patterns.size());
  for (const auto& p : patterns.patterns) stack.patterns.push_back(render::image_from_plan(plan, p));
  return stack;
}

CaptureStack warp_capture_stack(const PatternStack& patterns, const FlowField& flow) {
  if (flow.width() != patterns.width || flow.height() != patterns.height) {
    throw std::invalid_argument("warp_capture_stack: flow size differs from the patterns");
  }
  CaptureStack stack;
  stack.bits_x = patterns.bits_x;
  stack.bits_y = patterns.bits_y;
  stack.complements = patterns.complements;
  stack.black = ImageBuffer(patterns.width, patterns.height, 1, 1.0f);
  stack.white = ImageBuffer(patterns.width, patterns.height, 1, 1.0f);
  stack.patterns.reserve(patterns.patterns.size());
  for (const auto& p : patterns.patterns) stack.patterns.push_back(warp_by_flow(p, flow));
  return stack;
}

}  // namespace refmatte::graycode
