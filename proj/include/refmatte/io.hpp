// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// On-disk formats. Rasters are PNG; flow uses the Middlebury .flo layout
// ("PIEH", int32 width, int32 height, row-major float32 (dx, dy) pairs, all
// little-endian). Failures to open, read or write throw IoError; malformed
// contents throw std::invalid_argument.

#include <filesystem>
#include <iosfwd>

#include "refmatte/graycode.hpp"
#include "refmatte/image.hpp"

namespace refmatte::io {

enum class BitDepth { Eight = 8, Sixteen = 16 };

/// Gray or RGB output; alpha is dropped, palettes expanded. Values are q / (2^depth - 1).
ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageBuffer& image,
               BitDepth depth = BitDepth::Eight);

/// The value a sample takes after a write/read cycle at the given depth.
float quantize(float value, BitDepth depth);
ImageBuffer quantized(const ImageBuffer& image, BitDepth depth);

/// Written for both components of invalid pixels.
inline constexpr float kFlowInvalidValue = 1e10f;
/// Read back as invalid when either component exceeds this magnitude.
inline constexpr float kFlowInvalidThreshold = 1e9f;

void write_flow(std::ostream& out, const FlowField& flow);
FlowField read_flow(std::istream& in);
void write_flow(const std::filesystem::path& path, const FlowField& flow);
FlowField read_flow(const std::filesystem::path& path);

/// mask.png (8-bit), attenuation.png (16-bit), flow.flo.
struct MatteFiles {
  std::filesystem::path mask;
  std::filesystem::path attenuation;
  std::filesystem::path flow;
};
MatteFiles matte_files(const std::filesystem::path& dir);
void write_matte(const std::filesystem::path& dir, const Matte& matte);
Matte read_matte(const std::filesystem::path& dir);
/// Quantizes mask and attenuation the way write_matte stores them.
Matte quantized(const Matte& matte);

/// A capture directory holds capture.txt with "role file" lines, roles being
/// black, white, pattern-K and complement-K (K = bit plane, x planes first,
/// most significant first). Captures are stored as 16-bit PNG.
inline constexpr const char* kCaptureManifest = "capture.txt";
void write_capture_stack(const std::filesystem::path& dir, const graycode::CaptureStack& stack);
/// Throws ValidationError when members are missing or disagree in size.
graycode::CaptureStack read_capture_stack(const std::filesystem::path& dir);

}  // namespace refmatte::io
