// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "refmatte/errors.hpp"
#include "refmatte/io.hpp"

namespace refmatte::io {
namespace fs = std::filesystem;

MatteFiles matte_files(const fs::path& dir) {
  return {dir / "mask.png", dir / "attenuation.png", dir / "flow.flo"};
}

void write_matte(const fs::path& dir, const Matte& matte) {
  validate(matte);
  const auto files = matte_files(dir);
  write_png(files.mask, matte.mask, BitDepth::Eight);
  write_png(files.attenuation, matte.attenuation, BitDepth::Sixteen);
  write_flow(files.flow, matte.flow);
}

Matte read_matte(const fs::path& dir) {
  const auto files = matte_files(dir);
  Matte matte;
  matte.mask = read_png(files.mask);
  matte.attenuation = read_png(files.attenuation);
  matte.flow = read_flow(files.flow);
  if (matte.mask.channels() != 1 || matte.attenuation.channels() != 1) {
    throw ValidationError(dir.string() + ": mask and attenuation must be grayscale");
  }
  try {
    validate(matte);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(dir.string() + ": " + e.what());
  }
  return matte;
}

Matte quantized(const Matte& matte) {
  Matte out = matte;
  out.mask = quantized(matte.mask, BitDepth::Eight);
  out.attenuation = quantized(matte.attenuation, BitDepth::Sixteen);
  return out;
}

namespace {

std::string plane_name(const char* role, std::size_t plane) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%02zu", role, plane);
  return buf;
}

}  // namespace

void write_capture_stack(const fs::path& dir, const graycode::CaptureStack& stack) {
  const std::size_t planes = static_cast<std::size_t>(stack.bits_x + stack.bits_y);
  if (stack.patterns.size() != planes * (stack.complements ? 2 : 1)) {
    throw std::invalid_argument("capture stack: pattern count does not match its bit planes");
  }
  std::ostringstream manifest;
  auto put = [&](const std::string& role, const ImageBuffer& image) {
    const std::string file = role + ".png";
    write_png(dir / file, image, BitDepth::Sixteen);
    manifest << role << ' ' << file << '\n';
  };
  put("black", stack.black);
  put("white", stack.white);
  for (std::size_t p = 0; p < planes; ++p) {
    const std::size_t i = stack.complements ? 2 * p : p;
    put(plane_name("pattern", p), stack.patterns[i]);
    if (stack.complements) put(plane_name("complement", p), stack.patterns[i + 1]);
  }
  std::ofstream out(dir / kCaptureManifest);
  out << manifest.str();
  out.close();
  if (!out) throw IoError("cannot write " + (dir / kCaptureManifest).string());
}

graycode::CaptureStack read_capture_stack(const fs::path& dir) {
  const fs::path manifest_path = dir / kCaptureManifest;
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open " + manifest_path.string());
  std::map<std::string, std::string> roles;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string role;
    std::string file;
    if (!(ls >> role) || role[0] == '#') continue;
    if (!(ls >> file)) throw ValidationError(manifest_path.string() + ": role without a file");
    if (!roles.emplace(role, file).second) {
      throw ValidationError(manifest_path.string() + ": duplicate role " + role);
    }
  }
  auto load = [&](const std::string& role) {
    const auto it = roles.find(role);
    if (it == roles.end()) throw ValidationError("capture stack: missing member " + role);
    return read_png(dir / it->second);
  };

  graycode::CaptureStack stack;
  stack.white = load("white");
  stack.black = load("black");
  stack.bits_x = graycode::bits_for(stack.white.width());
  stack.bits_y = graycode::bits_for(stack.white.height());
  stack.complements = roles.count(plane_name("complement", 0)) != 0;
  const std::size_t planes = static_cast<std::size_t>(stack.bits_x + stack.bits_y);
  const std::size_t expected = 2 + planes * (stack.complements ? 2 : 1);
  if (roles.size() != expected) {
    throw ValidationError("capture stack: expected " + std::to_string(expected) +
                          " members, manifest lists " + std::to_string(roles.size()));
  }
  for (std::size_t p = 0; p < planes; ++p) {
    stack.patterns.push_back(load(plane_name("pattern", p)));
    if (stack.complements) stack.patterns.push_back(load(plane_name("complement", p)));
  }
  auto check = [&](const ImageBuffer& image) {
    if (!image.same_size(stack.white.width(), stack.white.height())) {
      throw ValidationError("capture stack: members differ in size");
    }
  };
  check(stack.black);
  for (const auto& p : stack.patterns) check(p);
  return stack;
}

}  // namespace refmatte::io
