// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "refmatte/image.hpp"

namespace refmatte::testing {

inline ImageBuffer random_image(int w, int h, int c, std::uint64_t seed, float lo = 0.0f,
                                float hi = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(lo, hi);
  ImageBuffer img(w, h, c);
  for (float& v : img.data()) v = dist(rng);
  return img;
}

/// Random valid matte. quantized = values on the 8-bit (mask) / 16-bit (rho) grids.
inline Matte random_matte(int w, int h, std::uint64_t seed, bool quantized = false,
                          float max_flow = 6.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  const float limit = std::min(max_flow, static_cast<float>(std::min(w, h)));
  std::uniform_real_distribution<float> offset(-limit, limit);
  Matte m(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float mask = unit(rng);
      float rho = unit(rng);
      if (quantized) {
        mask = static_cast<float>(static_cast<int>(mask * 255.0f)) / 255.0f;
        rho = static_cast<float>(static_cast<int>(rho * 65535.0f)) / 65535.0f;
      }
      m.mask.at(x, y) = mask;
      m.attenuation.at(x, y) = rho;
      if (unit(rng) < 0.1f) {
        m.flow.invalidate(x, y);
      } else {
        m.flow.set(x, y, offset(rng), offset(rng));
      }
    }
  }
  return m;
}

/// Fresh per-test scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("refmatte_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace refmatte::testing
