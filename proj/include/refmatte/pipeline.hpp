// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

// Dataset generation, matte extraction, compositing and evaluation as library
// calls; tools/refmatte.cpp is a thin command-line shell over these.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "refmatte/augment.hpp"
#include "refmatte/graycode.hpp"
#include "refmatte/metrics.hpp"
#include "refmatte/render/scene.hpp"
#include "refmatte/render/scene_file.hpp"

namespace refmatte::pipeline {

inline constexpr std::size_t kCategoryCount = 4;
/// Synthetic training mix: glass, glass with water, lens, complex.
inline constexpr std::array<double, kCategoryCount> kDefaultRatios = {52, 26, 20, 80};

struct DatasetConfig {
  int width = 512;
  int height = 512;
  std::size_t count = 100;
  std::uint64_t seed = 0;
  std::array<double, kCategoryCount> ratios = kDefaultRatios;
  /// Directory of PNG backgrounds; empty means procedurally textured backgrounds.
  std::filesystem::path backgrounds;
  /// Largest MSE allowed between a stored input and its re-composite.
  double self_check_mse = 1e-3;
  bool augment = false;
  AugmentConfig augment_config;
  graycode::ExtractOptions extract;
};

/// INI with sections [dataset], [augment] and [extract]; unknown keys are
/// rejected. Relative background paths resolve against base_dir.
/// Throws std::invalid_argument on malformed input.
DatasetConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
DatasetConfig read_config(const std::filesystem::path& path);
void write_config(std::ostream& out, const DatasetConfig& config);

/// Largest-remainder apportionment of count over the ratios.
std::array<std::size_t, kCategoryCount> category_counts(std::size_t count,
                                                        const std::array<double, kCategoryCount>& ratios);
/// Category of every sample index, grouped in category order.
std::vector<render::ObjectCategory> category_schedule(std::size_t count,
                                                      const std::array<double, kCategoryCount>& ratios);

struct ManifestRecord {
  std::string id;
  render::ObjectCategory category = render::ObjectCategory::Glass;
  std::uint64_t seed = 0;
  std::string background_source;
  // Paths relative to the dataset root.
  std::string scene;
  std::string input;
  std::string background;
  std::string mask;
  std::string attenuation;
  std::string flow;

  bool operator==(const ManifestRecord&) const = default;
};

struct DatasetManifest {
  std::array<std::size_t, kCategoryCount> counts{};
  std::vector<ManifestRecord> records;

  bool operator==(const DatasetManifest&) const = default;
};

inline constexpr const char* kManifestName = "manifest.tsv";

void write_manifest(std::ostream& out, const DatasetManifest& manifest);
/// Throws std::invalid_argument on malformed text.
DatasetManifest parse_manifest(std::istream& in);
/// Also checks that every referenced file exists (ValidationError otherwise).
DatasetManifest read_manifest(const std::filesystem::path& dataset_root);

/// Smooth-plus-detail colour texture in [0.05, 0.95], a pure function of the seed.
ImageBuffer procedural_background(std::uint64_t seed, int width, int height);
/// Sorted PNG files of a directory; ValidationError when there are none.
std::vector<std::filesystem::path> list_backgrounds(const std::filesystem::path& dir);
/// Loads a background, expands gray to RGB and resizes it to width x height.
ImageBuffer load_background(const std::filesystem::path& path, int width, int height);

struct RenderedSample {
  Sample sample;
  render::Scene scene;
  /// MSE between the stored (8-bit) input and the re-composite of the stored matte.
  double self_check_mse = 0.0;
};

/// Renders one sample, quantized exactly as it will be stored. The self-check
/// runs before augmentation, which perturbs the input photometrically.
RenderedSample render_sample(const render::Scene& scene, const ImageBuffer& background,
                             std::uint64_t seed);

struct GenerateReport {
  DatasetManifest manifest;
  double worst_self_check_mse = 0.0;
};

/// Writes samples/NNNNNN/{input,background,mask,attenuation}.png, flow.flo and
/// scene.ini plus manifest.tsv and config.ini under out_dir. Output depends
/// only on (config, seed); jobs only changes the wall time.
GenerateReport generate_dataset(const DatasetConfig& config, const std::filesystem::path& out_dir,
                                unsigned jobs = 1);

/// Reads a capture directory, extracts the matte and writes it to out_dir.
Matte extract_directory(const std::filesystem::path& capture_dir,
                        const std::filesystem::path& out_dir,
                        const graycode::ExtractOptions& options = {});

/// Renders the capture stack of a scene into out_dir.
void capture_scene(const render::Scene& scene, const std::filesystem::path& out_dir,
                   bool complements = true);

struct EvalRow {
  std::string id;
  std::string method;  // "pred" or "background"
  metrics::EvalReport report;
};

/// Scores pred_root/<id>/ mattes against every manifest record of a dataset.
/// Rows come per sample (pred, background) followed by the two means under id
/// "mean". Throws ValidationError when the prediction set differs from the
/// dataset.
std::vector<EvalRow> evaluate_dataset(const std::filesystem::path& pred_root,
                                      const std::filesystem::path& dataset_root,
                                      unsigned jobs = 1);
void write_eval_csv(std::ostream& out, const std::vector<EvalRow>& rows);

}  // namespace refmatte::pipeline
