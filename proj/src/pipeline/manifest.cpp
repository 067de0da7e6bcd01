// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "refmatte/errors.hpp"
#include "refmatte/pipeline.hpp"

namespace refmatte::pipeline {
namespace {

constexpr const char* kMagicLine = "# refmatte dataset manifest v1";
constexpr const char* kHeader =
    "id\tcategory\tseed\tbackground_source\tscene\tinput\tbackground\tmask\tattenuation\tflow";

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::uint64_t parse_u64(const std::string& text, const char* what) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw std::invalid_argument(std::string("manifest: bad ") + what + " '" + text + "'");
  }
  return v;
}

}  // namespace

void write_manifest(std::ostream& out, const DatasetManifest& m) {
  out << kMagicLine << '\n' << "# counts";
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    out << '\t' << render::category_name(render::kAllCategories[i]) << '=' << m.counts[i];
  }
  out << '\n' << kHeader << '\n';
  for (const auto& r : m.records) {
    out << r.id << '\t' << render::category_name(r.category) << '\t' << r.seed << '\t'
        << r.background_source << '\t' << r.scene << '\t' << r.input << '\t' << r.background
        << '\t' << r.mask << '\t' << r.attenuation << '\t' << r.flow << '\n';
  }
}

DatasetManifest parse_manifest(std::istream& in) {
  DatasetManifest m;
  std::string line;
  if (!std::getline(in, line) || line != kMagicLine) {
    throw std::invalid_argument("manifest: missing header line");
  }
  if (!std::getline(in, line) || line.rfind("# counts", 0) != 0) {
    throw std::invalid_argument("manifest: missing counts line");
  }
  const auto count_fields = split_tabs(line);
  if (count_fields.size() != kCategoryCount + 1) {
    throw std::invalid_argument("manifest: counts line needs four categories");
  }
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    const std::string& f = count_fields[i + 1];
    const std::size_t eq = f.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("manifest: bad count '" + f + "'");
    const auto category = render::parse_category(f.substr(0, eq));
    m.counts[static_cast<std::size_t>(category)] = parse_u64(f.substr(eq + 1), "count");
  }
  if (!std::getline(in, line) || line != kHeader) {
    throw std::invalid_argument("manifest: missing column header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != 10) throw std::invalid_argument("manifest: record needs 10 fields: " + line);
    ManifestRecord r;
    r.id = f[0];
    r.category = render::parse_category(f[1]);
    r.seed = parse_u64(f[2], "seed");
    r.background_source = f[3];
    r.scene = f[4];
    r.input = f[5];
    r.background = f[6];
    r.mask = f[7];
    r.attenuation = f[8];
    r.flow = f[9];
    m.records.push_back(std::move(r));
  }
  return m;
}

DatasetManifest read_manifest(const std::filesystem::path& root) {
  const auto path = root / kManifestName;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  DatasetManifest m = parse_manifest(in);
  for (const auto& r : m.records) {
    for (const std::string* file : {&r.scene, &r.input, &r.background, &r.mask, &r.attenuation,
                                    &r.flow}) {
      if (!std::filesystem::exists(root / *file)) {
        throw ValidationError("manifest: sample " + r.id + " references missing " + *file);
      }
    }
  }
  return m;
}

}  // namespace refmatte::pipeline
