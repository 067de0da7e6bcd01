// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>
#include <vector>

#include "refmatte/errors.hpp"
#include "refmatte/io.hpp"

namespace refmatte::io {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

struct Raw {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 or 3 after transforms
  int depth = 0;     // 8 or 16
  std::vector<unsigned char> bytes;
};

void on_warning(png_structp, png_const_charp) {}

// libpng reports errors by longjmp; everything with a destructor lives in the
// caller so nothing is skipped when that happens.
bool decode(std::FILE* file, Raw* raw, std::vector<png_bytep>* rows) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, on_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, file);
  png_read_info(png, info);
  const png_byte color = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  raw->width = static_cast<int>(png_get_image_width(png, info));
  raw->height = static_cast<int>(png_get_image_height(png, info));
  raw->channels = png_get_channels(png, info);
  raw->depth = png_get_bit_depth(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  raw->bytes.resize(stride * raw->height);
  rows->resize(raw->height);
  for (int y = 0; y < raw->height; ++y) (*rows)[y] = raw->bytes.data() + stride * y;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode(std::FILE* file, int width, int height, int channels, int depth,
            std::vector<png_bytep>* rows) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, on_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, file);
  png_set_IHDR(png, info, width, height, depth,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows->data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

int max_code(BitDepth depth) { return depth == BitDepth::Eight ? 255 : 65535; }

int to_code(float v, int max) {
  const float c = std::clamp(v, 0.0f, 1.0f);
  return static_cast<int>(std::lround(static_cast<double>(c) * max));
}

}  // namespace

float quantize(float value, BitDepth depth) {
  const int max = max_code(depth);
  return static_cast<float>(to_code(value, max)) / static_cast<float>(max);
}

ImageBuffer quantized(const ImageBuffer& image, BitDepth depth) {
  ImageBuffer out = image;
  for (float& v : out.data()) v = quantize(v, depth);
  return out;
}

ImageBuffer read_png(const std::filesystem::path& path) {
  File file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path.string());
  png_byte signature[8];
  if (std::fread(signature, 1, 8, file.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw std::invalid_argument(path.string() + " is not a PNG file");
  }
  std::rewind(file.get());
  Raw raw;
  std::vector<png_bytep> rows;
  if (!decode(file.get(), &raw, &rows)) throw IoError("cannot decode PNG " + path.string());
  if (raw.channels != 1 && raw.channels != 3) {
    throw std::invalid_argument(path.string() + ": unsupported PNG channel layout");
  }
  ImageBuffer image(raw.width, raw.height, raw.channels);
  auto out = image.data();
  if (raw.depth == 16) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const unsigned q = (raw.bytes[2 * i] << 8) | raw.bytes[2 * i + 1];
      out[i] = static_cast<float>(q) / 65535.0f;
    }
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<float>(raw.bytes[i]) / 255.0f;
  }
  return image;
}

void write_png(const std::filesystem::path& path, const ImageBuffer& image, BitDepth depth) {
  if (image.empty()) throw std::invalid_argument("write_png: empty image");
  const int max = max_code(depth);
  const int bytes_per_sample = depth == BitDepth::Eight ? 1 : 2;
  const std::size_t stride =
      static_cast<std::size_t>(image.width()) * image.channels() * bytes_per_sample;
  std::vector<unsigned char> bytes(stride * image.height());
  const auto in = image.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const int q = to_code(in[i], max);
    if (bytes_per_sample == 1) {
      bytes[i] = static_cast<unsigned char>(q);
    } else {
      bytes[2 * i] = static_cast<unsigned char>(q >> 8);
      bytes[2 * i + 1] = static_cast<unsigned char>(q & 0xff);
    }
  }
  std::vector<png_bytep> rows(image.height());
  for (int y = 0; y < image.height(); ++y) rows[y] = bytes.data() + stride * y;

  File file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot write " + path.string());
  if (!encode(file.get(), image.width(), image.height(), image.channels(),
              static_cast<int>(depth), &rows)) {
    throw IoError("failed encoding PNG " + path.string());
  }
  if (std::fflush(file.get()) != 0) throw IoError("failed writing " + path.string());
}

}  // namespace refmatte::io
