// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "refmatte/image.hpp"

namespace refmatte {

/// Bilinear interpolation at real pixel coordinates (pixel centres at integers),
/// clamping to the border. Returns one value per channel. Throws
/// std::invalid_argument for non-finite coordinates or an empty image.
std::vector<float> bilinear_sample(const ImageBuffer& image, double x, double y);

struct CompositeResult {
  ImageBuffer image;
  /// Pixels with m > 0 whose flow was flagged invalid; they composite with zero flow.
  std::size_t invalid_flow_pixels = 0;
};

/// C = (1 - m) B + m rho M(B, p + flow(p)).
CompositeResult composite_refractive(const Matte& matte, const ImageBuffer& background);

/// C = F + (1 - alpha) B for premultiplied F, clamped to [0,1]. alpha is single-channel.
ImageBuffer composite_alpha(const ImageBuffer& foreground, const ImageBuffer& background,
                            const ImageBuffer& alpha);

/// Backward warp: out(p) = M(image, p + flow(p)). Invalid flow entries sample at p.
ImageBuffer warp_by_flow(const ImageBuffer& image, const FlowField& flow);

/// Bilinear resize with pixel-centre alignment.
ImageBuffer resize_bilinear(const ImageBuffer& image, int width, int height);

}  // namespace refmatte
