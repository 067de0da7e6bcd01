// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "refmatte/errors.hpp"
#include "refmatte/pipeline.hpp"

namespace refmatte::pipeline {
namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kDatasetKeys = {"width", "height", "count", "seed", "ratios",
                                            "backgrounds", "self_check_mse"};
const std::set<std::string> kAugmentKeys = {"enabled",   "color_range",     "scale_min",
                                            "scale_max", "noise_amplitude", "flip_horizontal",
                                            "flip_vertical", "crop_size",   "blur",
                                            "blur_radius"};
const std::set<std::string> kExtractKeys = {"mask_threshold", "ambiguity"};

[[noreturn]] void bad(const std::string& key, const std::string& value, const char* expected) {
  throw std::invalid_argument("config: '" + key + "' = '" + value + "' is not " + expected);
}

template <typename Int>
Int to_int(const std::string& key, const std::string& text) {
  Int v{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) bad(key, text, "an integer");
  return v;
}

double to_double(const std::string& key, const std::string& text) {
  std::istringstream ss(text);
  ss.imbue(std::locale::classic());
  double v = 0.0;
  if (!(ss >> v) || !(ss >> std::ws).eof() || !std::isfinite(v)) bad(key, text, "a number");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  bad(key, text, "a boolean");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void validate(const DatasetConfig& c) {
  constexpr int kMinSide = 16;
  constexpr int kMaxSide = 4096;
  if (c.width < kMinSide || c.height < kMinSide || c.width > kMaxSide || c.height > kMaxSide) {
    throw std::invalid_argument("config: image sides must lie in [16, 4096]");
  }
  double total = 0.0;
  for (double r : c.ratios) {
    if (!(r >= 0.0)) throw std::invalid_argument("config: category ratios must be >= 0");
    total += r;
  }
  if (!(total > 0.0)) throw std::invalid_argument("config: category ratios sum to zero");
  if (!(c.self_check_mse >= 0.0)) throw std::invalid_argument("config: self_check_mse < 0");
  validate(c.augment_config);
  if (c.augment && c.augment_config.crop_size > std::min(c.width, c.height)) {
    throw std::invalid_argument("config: crop_size exceeds the rendered image");
  }
  if (!(c.extract.mask_threshold > 0.0f && c.extract.mask_threshold < 1.0f) ||
      !(c.extract.ambiguity >= 0.0f)) {
    throw std::invalid_argument("config: extract thresholds out of range");
  }
}

}  // namespace

DatasetConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  DatasetConfig c;
  for (const auto& [section, body] : tree) {
    const std::set<std::string>* keys = nullptr;
    if (section == "dataset") keys = &kDatasetKeys;
    if (section == "augment") keys = &kAugmentKeys;
    if (section == "extract") keys = &kExtractKeys;
    if (keys == nullptr) throw std::invalid_argument("config: unknown section [" + section + "]");
    for (const auto& [key, node] : body) {
      if (!keys->count(key)) {
        throw std::invalid_argument("config: unknown key '" + key + "' in [" + section + "]");
      }
      const std::string v = node.data();
      const std::string name = section + "." + key;
      if (section == "dataset") {
        if (key == "width") c.width = to_int<int>(name, v);
        if (key == "height") c.height = to_int<int>(name, v);
        if (key == "count") c.count = to_int<std::size_t>(name, v);
        if (key == "seed") c.seed = to_int<std::uint64_t>(name, v);
        if (key == "self_check_mse") c.self_check_mse = to_double(name, v);
        if (key == "backgrounds") {
          c.backgrounds = v.empty() ? std::filesystem::path() : base_dir / v;
        }
        if (key == "ratios") {
          std::istringstream ss(v);
          std::string token;
          std::size_t i = 0;
          while (ss >> token) {
            if (i == kCategoryCount) bad(name, v, "four ratios");
            c.ratios[i++] = to_double(name, token);
          }
          if (i != kCategoryCount) bad(name, v, "four ratios");
        }
      } else if (section == "augment") {
        auto& a = c.augment_config;
        if (key == "enabled") c.augment = to_bool(name, v);
        if (key == "color_range") a.color_range = to_double(name, v);
        if (key == "scale_min") a.scale_min = to_double(name, v);
        if (key == "scale_max") a.scale_max = to_double(name, v);
        if (key == "noise_amplitude") a.noise_amplitude = to_double(name, v);
        if (key == "flip_horizontal") a.flip_horizontal_probability = to_double(name, v);
        if (key == "flip_vertical") a.flip_vertical_probability = to_double(name, v);
        if (key == "crop_size") a.crop_size = to_int<int>(name, v);
        if (key == "blur") a.blur = to_bool(name, v);
        if (key == "blur_radius") a.blur_radius = to_double(name, v);
      } else {
        if (key == "mask_threshold") c.extract.mask_threshold = static_cast<float>(to_double(name, v));
        if (key == "ambiguity") c.extract.ambiguity = static_cast<float>(to_double(name, v));
      }
    }
  }
  validate(c);
  return c;
}

DatasetConfig read_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

void write_config(std::ostream& out, const DatasetConfig& c) {
  const auto& a = c.augment_config;
  out << "[dataset]\n"
      << "width = " << c.width << "\n"
      << "height = " << c.height << "\n"
      << "count = " << c.count << "\n"
      << "seed = " << c.seed << "\n"
      << "ratios = " << num(c.ratios[0]) << ' ' << num(c.ratios[1]) << ' ' << num(c.ratios[2])
      << ' ' << num(c.ratios[3]) << "\n"
      << "backgrounds = " << c.backgrounds.string() << "\n"
      << "self_check_mse = " << num(c.self_check_mse) << "\n\n"
      << "[augment]\n"
      << "enabled = " << (c.augment ? "true" : "false") << "\n"
      << "color_range = " << num(a.color_range) << "\n"
      << "scale_min = " << num(a.scale_min) << "\n"
      << "scale_max = " << num(a.scale_max) << "\n"
      << "noise_amplitude = " << num(a.noise_amplitude) << "\n"
      << "flip_horizontal = " << num(a.flip_horizontal_probability) << "\n"
      << "flip_vertical = " << num(a.flip_vertical_probability) << "\n"
      << "crop_size = " << a.crop_size << "\n"
      << "blur = " << (a.blur ? "true" : "false") << "\n"
      << "blur_radius = " << num(a.blur_radius) << "\n\n"
      << "[extract]\n"
      << "mask_threshold = " << num(c.extract.mask_threshold) << "\n"
      << "ambiguity = " << num(c.extract.ambiguity) << "\n";
}

std::array<std::size_t, kCategoryCount> category_counts(
    std::size_t count, const std::array<double, kCategoryCount>& ratios) {
  double total = 0.0;
  for (double r : ratios) total += r;
  std::array<std::size_t, kCategoryCount> counts{};
  std::array<double, kCategoryCount> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    const double exact = static_cast<double>(count) * ratios[i] / total;
    counts[i] = static_cast<std::size_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  // Hand out the leftovers by largest remainder; ties go to the earlier category.
  while (assigned < count) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kCategoryCount; ++i) {
      if (remainder[i] > remainder[best]) best = i;
    }
    ++counts[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  return counts;
}

std::vector<render::ObjectCategory> category_schedule(
    std::size_t count, const std::array<double, kCategoryCount>& ratios) {
  const auto counts = category_counts(count, ratios);
  std::vector<render::ObjectCategory> schedule;
  schedule.reserve(count);
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    schedule.insert(schedule.end(), counts[i], render::kAllCategories[i]);
  }
  return schedule;
}

}  // namespace refmatte::pipeline
