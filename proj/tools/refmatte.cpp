// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
//
// refmatte: generate | extract | composite | evaluate | capture
//
// Exit codes: 0 ok, 2 usage or invalid config, 3 I/O error, 4 validation failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "refmatte/composite.hpp"
#include "refmatte/errors.hpp"
#include "refmatte/io.hpp"
#include "refmatte/pipeline.hpp"
#include "refmatte/render/scene_file.hpp"
#include "refmatte/simd/kernels.hpp"

namespace {

namespace fs = std::filesystem;
using namespace refmatte;

constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;

// Raised for problems with the command line or config file rather than the data.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

pipeline::DatasetConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  try {
    return pipeline::read_config(path);
  } catch (const std::invalid_argument& e) {
    throw UsageError(path + ": " + e.what());
  }
}

int run_generate(const std::string& config_path, const std::string& out,
                 std::optional<std::uint64_t> seed, std::optional<std::size_t> count,
                 unsigned jobs) {
  pipeline::DatasetConfig config = load_config(config_path);
  if (seed) config.seed = *seed;
  if (count) config.count = *count;
  const auto report = pipeline::generate_dataset(config, out, jobs);
  const auto& c = report.manifest.counts;
  std::printf("generated %zu samples in %s (glass %zu, glass_water %zu, lens %zu, complex %zu)\n",
              report.manifest.records.size(), out.c_str(), c[0], c[1], c[2], c[3]);
  std::printf("worst self-check MSE %.3g (limit %.3g)\n", report.worst_self_check_mse,
              config.self_check_mse);
  return 0;
}

int run_extract(const std::string& config_path, const std::string& capture,
                const std::string& out) {
  const pipeline::DatasetConfig config = load_config(config_path);
  const Matte matte = pipeline::extract_directory(capture, out, config.extract);
  std::printf("extracted %dx%d matte to %s (%zu pixels without a decodable code)\n",
              matte.width(), matte.height(), out.c_str(), matte.flow.invalid_count());
  return 0;
}

int run_composite(const std::string& matte_dir, const std::string& background_path,
                  const std::string& out) {
  const Matte matte = io::read_matte(matte_dir);
  const ImageBuffer background = io::read_png(background_path);
  if (!background.same_size(matte.width(), matte.height())) {
    throw ValidationError("background and matte sizes differ");
  }
  const auto result = composite_refractive(matte, background);
  io::write_png(out, result.image);
  if (result.invalid_flow_pixels > 0) {
    std::printf("%zu object pixels had no valid flow and were composited unshifted\n",
                result.invalid_flow_pixels);
  }
  return 0;
}

int run_evaluate(const std::string& pred, const std::string& dataset, const std::string& out,
                 unsigned jobs) {
  const auto rows = pipeline::evaluate_dataset(pred, dataset, jobs);
  if (out.empty() || out == "-") {
    pipeline::write_eval_csv(std::cout, rows);
    return 0;
  }
  std::ofstream file(out);
  if (!file) throw IoError("cannot write " + out);
  pipeline::write_eval_csv(file, rows);
  file.close();
  if (!file) throw IoError("failed writing " + out);
  return 0;
}

int run_capture(const std::string& scene_path, const std::string& out, bool no_complements) {
  render::Scene scene;
  try {
    scene = render::read_scene(scene_path);
  } catch (const std::invalid_argument& e) {
    throw UsageError(scene_path + ": " + e.what());
  }
  pipeline::capture_scene(scene, out, !no_complements);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Refractive matting toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> count;
  unsigned jobs = 1;

  auto* generate = app.add_subcommand("generate", "Render a synthetic dataset with ground-truth mattes");
  generate->add_option("--config", config_path, "Dataset config (INI)")->check(CLI::ExistingFile);
  generate->add_option("--out", out, "Output dataset directory")->required();
  generate->add_option("--seed", seed, "Dataset seed (overrides the config)");
  generate->add_option("--count", count, "Number of samples (overrides the config)");
  generate->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string capture_dir;
  auto* extract = app.add_subcommand("extract", "Decode a Gray-code capture stack into a matte");
  extract->add_option("--capture", capture_dir, "Capture directory with capture.txt")->required();
  extract->add_option("--config", config_path, "Config with an [extract] section")
      ->check(CLI::ExistingFile);
  extract->add_option("--out", out, "Output matte directory")->required();

  std::string matte_dir;
  std::string background_path;
  auto* composite = app.add_subcommand("composite", "Composite a matte onto a new background");
  composite->add_option("--matte", matte_dir, "Matte directory")->required();
  composite->add_option("--background", background_path, "Background PNG")->required();
  composite->add_option("--out", out, "Output PNG")->required();

  std::string pred_dir;
  std::string dataset_dir;
  auto* evaluate = app.add_subcommand("evaluate", "Score predicted mattes against a dataset");
  evaluate->add_option("--pred", pred_dir, "Directory of <id>/ matte directories")->required();
  evaluate->add_option("--dataset", dataset_dir, "Dataset root with manifest.tsv")->required();
  evaluate->add_option("--out", out, "Report CSV (stdout if omitted)");
  evaluate->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  std::string scene_path;
  bool no_complements = false;
  auto* capture = app.add_subcommand("capture", "Render the Gray-code capture stack of a scene");
  capture->add_option("--scene", scene_path, "Scene file (INI)")->required()->check(CLI::ExistingFile);
  capture->add_option("--out", out, "Output capture directory")->required();
  capture->add_flag("--no-complements", no_complements, "Threshold against white/2 instead");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*generate) return run_generate(config_path, out, seed, count, jobs);
    if (*extract) return run_extract(config_path, capture_dir, out);
    if (*composite) return run_composite(matte_dir, background_path, out);
    if (*evaluate) return run_evaluate(pred_dir, dataset_dir, out, jobs);
    if (*capture) return run_capture(scene_path, out, no_complements);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "refmatte: %s\n", e.what());
    return kExitUsage;
  } catch (const IoError& e) {
    std::fprintf(stderr, "refmatte: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "refmatte: %s\n", e.what());
    return kExitValidation;
  }
  return kExitUsage;
}
