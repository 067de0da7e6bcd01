// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "refmatte/errors.hpp"
#include "refmatte/io.hpp"

namespace refmatte::io {
namespace {

constexpr char kMagic[4] = {'P', 'I', 'E', 'H'};

void put_u32(std::vector<unsigned char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace

void write_flow(std::ostream& out, const FlowField& flow) {
  std::vector<unsigned char> buf;
  buf.reserve(12 + 8 * flow.pixel_count());
  buf.insert(buf.end(), kMagic, kMagic + 4);
  put_u32(buf, static_cast<std::uint32_t>(flow.width()));
  put_u32(buf, static_cast<std::uint32_t>(flow.height()));
  const auto dx = flow.dx_plane();
  const auto dy = flow.dy_plane();
  const auto valid = flow.valid_plane();
  for (std::size_t i = 0; i < flow.pixel_count(); ++i) {
    put_u32(buf, std::bit_cast<std::uint32_t>(valid[i] ? dx[i] : kFlowInvalidValue));
    put_u32(buf, std::bit_cast<std::uint32_t>(valid[i] ? dy[i] : kFlowInvalidValue));
  }
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing flow data");
}

FlowField read_flow(std::istream& in) {
  unsigned char header[12];
  if (!in.read(reinterpret_cast<char*>(header), 12)) {
    throw std::invalid_argument("flow file: truncated header");
  }
  if (std::memcmp(header, kMagic, 4) != 0) throw std::invalid_argument("flow file: bad magic");
  const auto w = static_cast<std::int32_t>(get_u32(header + 4));
  const auto h = static_cast<std::int32_t>(get_u32(header + 8));
  if (w <= 0 || h <= 0 || static_cast<std::int64_t>(w) * h > (std::int64_t{1} << 28)) {
    throw std::invalid_argument("flow file: bad dimensions");
  }
  FlowField flow(w, h);
  std::vector<unsigned char> body(8 * flow.pixel_count());
  if (!in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(body.size()))) {
    throw std::invalid_argument("flow file: truncated data");
  }
  auto dx = flow.dx_plane();
  auto dy = flow.dy_plane();
  auto valid = flow.valid_plane();
  for (std::size_t i = 0; i < flow.pixel_count(); ++i) {
    const float u = std::bit_cast<float>(get_u32(body.data() + 8 * i));
    const float v = std::bit_cast<float>(get_u32(body.data() + 8 * i + 4));
    const bool ok = std::isfinite(u) && std::isfinite(v) && std::abs(u) <= kFlowInvalidThreshold &&
                    std::abs(v) <= kFlowInvalidThreshold;
    dx[i] = ok ? u : 0.0f;
    dy[i] = ok ? v : 0.0f;
    valid[i] = ok ? 1 : 0;
  }
  return flow;
}

void write_flow(const std::filesystem::path& path, const FlowField& flow) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_flow(out, flow);
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

FlowField read_flow(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read_flow(in);
}

}  // namespace refmatte::io
