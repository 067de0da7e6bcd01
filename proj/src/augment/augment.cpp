// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include "refmatte/augment.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "refmatte/composite.hpp"
#include "refmatte/rng.hpp"

namespace refmatte {
namespace {

void require_in(double v, double lo, double hi, const char* what) {
  if (!(v >= lo && v <= hi)) {
    throw std::invalid_argument(std::string(what) + " out of range");
  }
}

template <typename Fn>
ImageBuffer remap(const ImageBuffer& src, Fn source_of) {
  ImageBuffer out(src.width(), src.height(), src.channels());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const auto [sx, sy] = source_of(x, y);
      for (int c = 0; c < src.channels(); ++c) out.at(x, y, c) = src.at(sx, sy, c);
    }
  }
  return out;
}

template <typename Fn>
FlowField remap(const FlowField& src, Fn source_of, float sign_x, float sign_y) {
  FlowField out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const auto [sx, sy] = source_of(x, y);
      if (src.valid(sx, sy)) {
        out.set(x, y, sign_x * src.dx(sx, sy), sign_y * src.dy(sx, sy));
      } else {
        out.invalidate(x, y);
      }
    }
  }
  return out;
}

template <typename Fn>
Sample remap_sample(const Sample& s, Fn source_of, float sign_x, float sign_y) {
  Sample out;
  out.input = remap(s.input, source_of);
  out.background = remap(s.background, source_of);
  out.matte.mask = remap(s.matte.mask, source_of);
  out.matte.attenuation = remap(s.matte.attenuation, source_of);
  out.matte.flow = remap(s.matte.flow, source_of, sign_x, sign_y);
  out.seed = s.seed;
  out.scene_id = s.scene_id;
  return out;
}

void jitter_image(ImageBuffer& image, const ColorJitter& j) {
  const auto b = static_cast<float>(j.brightness);
  const auto contrast = static_cast<float>(1.0 + j.contrast);
  const auto saturation = static_cast<float>(1.0 + j.saturation);
  const int c = image.channels();
  auto data = image.data();
  for (std::size_t p = 0; p < image.pixel_count(); ++p) {
    float* px = data.data() + p * c;
    for (int k = 0; k < c; ++k) {
      if (j.brightness != 0.0) px[k] += b;
      if (j.contrast != 0.0) px[k] = (px[k] - 0.5f) * contrast + 0.5f;
    }
    if (c == 3 && j.saturation != 0.0) {
      const float luma = 0.299f * px[0] + 0.587f * px[1] + 0.114f * px[2];
      for (int k = 0; k < 3; ++k) px[k] = luma + saturation * (px[k] - luma);
    }
    for (int k = 0; k < c; ++k) px[k] = std::clamp(px[k], 0.0f, 1.0f);
  }
}

// Bilinear resample of a flow plane pair; validity needs all four neighbours valid.
FlowField resize_flow(const FlowField& flow, int width, int height) {
  FlowField out(width, height);
  const double sx = static_cast<double>(flow.width()) / width;
  const double sy = static_cast<double>(flow.height()) / height;
  const auto rx = static_cast<float>(static_cast<double>(width) / flow.width());
  const auto ry = static_cast<float>(static_cast<double>(height) / flow.height());
  const int max_x = flow.width() - 1;
  const int max_y = flow.height() - 1;
  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, static_cast<double>(max_y));
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, max_y);
    const double ty = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, static_cast<double>(max_x));
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, max_x);
      const double tx = fx - x0;
      if (!(flow.valid(x0, y0) && flow.valid(x1, y0) && flow.valid(x0, y1) && flow.valid(x1, y1))) {
        out.invalidate(x, y);
        continue;
      }
      auto lerp2 = [&](auto get) {
        const double top = get(x0, y0) * (1.0 - tx) + get(x1, y0) * tx;
        const double bottom = get(x0, y1) * (1.0 - tx) + get(x1, y1) * tx;
        return top * (1.0 - ty) + bottom * ty;
      };
      const double dx = lerp2([&](int a, int b) { return static_cast<double>(flow.dx(a, b)); });
      const double dy = lerp2([&](int a, int b) { return static_cast<double>(flow.dy(a, b)); });
      out.set(x, y, static_cast<float>(dx) * rx, static_cast<float>(dy) * ry);
    }
  }
  return out;
}

std::vector<float> gaussian_kernel(int half, double sigma) {
  std::vector<float> k(2 * half + 1);
  for (int i = -half; i <= half; ++i) {
    k[i + half] = static_cast<float>(std::exp(-(i * i) / (2.0 * sigma * sigma)));
  }
  return k;
}

}  // namespace

void validate(const Sample& s) {
  const int w = s.input.width();
  const int h = s.input.height();
  if (s.input.empty() || !s.background.same_shape(s.input) || s.matte.width() != w ||
      s.matte.height() != h) {
    throw std::invalid_argument("Sample: member sizes differ");
  }
  validate(s.matte);
}

bool bit_equal(const Sample& a, const Sample& b) {
  return bit_equal(a.input, b.input) && bit_equal(a.background, b.background) &&
         bit_equal(a.matte, b.matte);
}

void validate(const AugmentConfig& c) {
  require_in(c.color_range, 0.0, kMaxColorDelta, "color_range");
  require_in(c.scale_min, kMinScale, kMaxScale, "scale_min");
  require_in(c.scale_max, c.scale_min, kMaxScale, "scale_max");
  require_in(c.noise_amplitude, 0.0, kMaxNoise, "noise_amplitude");
  require_in(c.flip_horizontal_probability, 0.0, 1.0, "flip_horizontal_probability");
  require_in(c.flip_vertical_probability, 0.0, 1.0, "flip_vertical_probability");
  if (c.crop_size < 0) throw std::invalid_argument("crop_size must be >= 0");
  if (!(c.blur_radius >= 0.0) || !std::isfinite(c.blur_radius)) {
    throw std::invalid_argument("blur_radius must be >= 0");
  }
}

Sample flip_horizontal(const Sample& s) {
  const int last = s.width() - 1;
  return remap_sample(
      s, [last](int x, int y) { return std::pair{last - x, y}; }, -1.0f, 1.0f);
}

Sample flip_vertical(const Sample& s) {
  const int last = s.height() - 1;
  return remap_sample(
      s, [last](int x, int y) { return std::pair{x, last - y}; }, 1.0f, -1.0f);
}

Sample jitter_color(const Sample& s, const ColorJitter& j) {
  require_in(j.brightness, -kMaxColorDelta, kMaxColorDelta, "brightness delta");
  require_in(j.contrast, -kMaxColorDelta, kMaxColorDelta, "contrast delta");
  require_in(j.saturation, -kMaxColorDelta, kMaxColorDelta, "saturation delta");
  Sample out = s;
  jitter_image(out.input, j);
  jitter_image(out.background, j);
  return out;
}

Sample add_noise(const Sample& s, double amplitude, std::uint64_t seed) {
  require_in(amplitude, 0.0, kMaxNoise, "noise amplitude");
  Sample out = s;
  if (amplitude == 0.0) return out;
  Rng rng(seed);
  for (float& v : out.input.data()) {
    const auto n = static_cast<float>(rng.uniform(-amplitude, amplitude));
    v = std::clamp(v + n, 0.0f, 1.0f);
  }
  return out;
}

Sample scale_sample(const Sample& s, double factor, int min_size) {
  require_in(factor, kMinScale, kMaxScale, "scale factor");
  const int w = static_cast<int>(std::lround(s.width() * factor));
  const int h = static_cast<int>(std::lround(s.height() * factor));
  if (w < min_size || h < min_size) {
    throw std::invalid_argument("scale_sample: result smaller than the crop size");
  }
  if (w == s.width() && h == s.height()) return s;
  Sample out;
  out.input = resize_bilinear(s.input, w, h);
  out.background = resize_bilinear(s.background, w, h);
  out.matte.mask = resize_bilinear(s.matte.mask, w, h);
  out.matte.attenuation = resize_bilinear(s.matte.attenuation, w, h);
  out.matte.flow = resize_flow(s.matte.flow, w, h);
  out.seed = s.seed;
  out.scene_id = s.scene_id;
  return out;
}

Sample blur_boundary(const Sample& s, double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("blur_boundary: radius must be >= 0");
  }
  if (radius == 0.0) return s;
  const int w = s.width();
  const int h = s.height();
  const int half = static_cast<int>(std::ceil(radius));
  const auto kernel = gaussian_kernel(half, radius / 2.0);
  const ImageBuffer& mask = s.matte.mask;

  std::vector<std::uint8_t> inside(s.matte.flow.pixel_count());
  for (std::size_t i = 0; i < inside.size(); ++i) inside[i] = mask.data()[i] > 0.5f ? 1 : 0;
  auto in = [&](int x, int y) { return inside[static_cast<std::size_t>(y) * w + x] != 0; };

  // Band = Chebyshev distance <= half from a pixel whose 4-neighbourhood straddles the outline.
  std::vector<std::uint8_t> band(inside.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool here = in(x, y);
      const bool edge = (x > 0 && in(x - 1, y) != here) || (x + 1 < w && in(x + 1, y) != here) ||
                        (y > 0 && in(x, y - 1) != here) || (y + 1 < h && in(x, y + 1) != here);
      if (!edge) continue;
      for (int yy = std::max(0, y - half); yy <= std::min(h - 1, y + half); ++yy) {
        for (int xx = std::max(0, x - half); xx <= std::min(w - 1, x + half); ++xx) {
          band[static_cast<std::size_t>(yy) * w + xx] = 1;
        }
      }
    }
  }

  Sample out = s;
  Matte& m = out.matte;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!band[static_cast<std::size_t>(y) * w + x]) continue;
      double total = 0.0;
      double msum = 0.0;
      double obj_w = 0.0;
      double rho = 0.0;
      double flow_w = 0.0;
      double fx = 0.0;
      double fy = 0.0;
      for (int j = -half; j <= half; ++j) {
        const int sy = std::clamp(y + j, 0, h - 1);
        for (int i = -half; i <= half; ++i) {
          const int sx = std::clamp(x + i, 0, w - 1);
          const double k = static_cast<double>(kernel[i + half]) * kernel[j + half];
          total += k;
          msum += k * mask.at(sx, sy);
          if (!in(sx, sy)) continue;
          obj_w += k;
          rho += k * s.matte.attenuation.at(sx, sy);
          if (s.matte.flow.valid(sx, sy)) {
            flow_w += k;
            fx += k * s.matte.flow.dx(sx, sy);
            fy += k * s.matte.flow.dy(sx, sy);
          }
        }
      }
      m.mask.at(x, y) = std::clamp(static_cast<float>(msum / total), 0.0f, 1.0f);
      if (in(x, y) || obj_w == 0.0) continue;
      m.attenuation.at(x, y) = std::clamp(static_cast<float>(rho / obj_w), 0.0f, 1.0f);
      if (flow_w > 0.0) {
        m.flow.set(x, y, static_cast<float>(fx / flow_w), static_cast<float>(fy / flow_w));
      }
    }
  }

  // Apply the change in the composite rather than replacing the band outright, so
  // photometric perturbations already present in the input survive.
  const ImageBuffer before = composite_refractive(s.matte, s.background).image;
  const ImageBuffer after = composite_refractive(m, out.background).image;
  const int c = out.input.channels();
  auto pixels = out.input.data();
  for (std::size_t i = 0; i < band.size(); ++i) {
    if (!band[i]) continue;
    for (int k = 0; k < c; ++k) {
      const std::size_t j = i * c + k;
      pixels[j] = std::clamp(pixels[j] + (after.data()[j] - before.data()[j]), 0.0f, 1.0f);
    }
  }
  return out;
}

Sample crop(const Sample& s, int x0, int y0, int width, int height) {
  if (x0 < 0 || y0 < 0 || width <= 0 || height <= 0 || x0 + width > s.width() ||
      y0 + height > s.height()) {
    throw std::invalid_argument("crop: window outside the sample");
  }
  if (x0 == 0 && y0 == 0 && width == s.width() && height == s.height()) return s;
  auto cut = [&](const ImageBuffer& src) {
    ImageBuffer out(width, height, src.channels());
    for (int y = 0; y < height; ++y) {
      const auto row = src.row(y0 + y);
      std::copy_n(row.begin() + static_cast<std::ptrdiff_t>(x0) * src.channels(),
                  static_cast<std::size_t>(width) * src.channels(), out.row(y).begin());
    }
    return out;
  };
  Sample out;
  out.input = cut(s.input);
  out.background = cut(s.background);
  out.matte.mask = cut(s.matte.mask);
  out.matte.attenuation = cut(s.matte.attenuation);
  out.matte.flow = FlowField(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const float dx = s.matte.flow.dx(x0 + x, y0 + y);
      const float dy = s.matte.flow.dy(x0 + x, y0 + y);
      // Offsets longer than the new frame break the matte's range invariant.
      if (s.matte.flow.valid(x0 + x, y0 + y) && std::abs(dx) <= static_cast<float>(width) &&
          std::abs(dy) <= static_cast<float>(height)) {
        out.matte.flow.set(x, y, dx, dy);
      } else {
        out.matte.flow.invalidate(x, y);
      }
    }
  }
  out.seed = s.seed;
  out.scene_id = s.scene_id;
  return out;
}

Sample random_crop(const Sample& s, int size, std::uint64_t seed) {
  if (size <= 0 || size > s.width() || size > s.height()) {
    throw std::invalid_argument("random_crop: crop size exceeds the sample");
  }
  Rng rng(seed);
  const auto x0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.width() - size + 1)));
  const auto y0 = static_cast<int>(rng.below(static_cast<std::uint64_t>(s.height() - size + 1)));
  return crop(s, x0, y0, size, size);
}

Sample augment(const Sample& sample, const AugmentConfig& config) {
  validate(config);
  double scale_lo = config.scale_min;
  if (config.crop_size > 0) {
    const int shortest = std::min(sample.width(), sample.height());
    scale_lo = std::max(scale_lo, static_cast<double>(config.crop_size) / shortest);
    if (scale_lo > config.scale_max) {
      throw std::invalid_argument("augment: sample too small for the crop size");
    }
  }
  // Every draw happens unconditionally so the stream layout never depends on the outcome.
  Rng rng(mix_seed(config.seed, sample.seed));
  const double r = config.color_range;
  ColorJitter jitter;
  jitter.brightness = rng.uniform(-r, r);
  jitter.contrast = rng.uniform(-r, r);
  jitter.saturation = rng.uniform(-r, r);
  const double factor = rng.uniform(scale_lo, config.scale_max);
  const std::uint64_t noise_seed = rng.next();
  const bool flip_h = rng.bernoulli(config.flip_horizontal_probability);
  const bool flip_v = rng.bernoulli(config.flip_vertical_probability);
  const std::uint64_t crop_seed = rng.next();

  Sample s = jitter_color(sample, jitter);
  s = scale_sample(s, factor, config.crop_size);
  s = add_noise(s, config.noise_amplitude, noise_seed);
  if (flip_h) s = flip_horizontal(s);
  if (flip_v) s = flip_vertical(s);
  if (config.blur) s = blur_boundary(s, config.blur_radius);
  if (config.crop_size > 0) s = random_crop(s, config.crop_size, crop_seed);
  return s;
}

}  // namespace refmatte
