// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include "refmatte/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <system_error>

#include "parallel.hpp"
#include "refmatte/composite.hpp"
#include "refmatte/errors.hpp"
#include "refmatte/io.hpp"
#include "refmatte/render/renderer.hpp"
#include "refmatte/rng.hpp"

namespace refmatte::pipeline {
namespace fs = std::filesystem;

namespace {

// Seed streams derived from a sample seed.
constexpr std::uint64_t kBackgroundStream = 1;

void make_directories(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string() +
                  (ec ? ": " + ec.message() : std::string()));
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string sample_id(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu", index);
  return buf;
}

ImageBuffer to_rgb(const ImageBuffer& image) {
  if (image.channels() == 3) return image;
  ImageBuffer out(image.width(), image.height(), 3);
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    for (int k = 0; k < 3; ++k) out.data()[3 * i + k] = image.data()[i];
  }
  return out;
}

void quantize_sample(Sample& s) {
  s.input = io::quantized(s.input, io::BitDepth::Eight);
  s.background = io::quantized(s.background, io::BitDepth::Eight);
  s.matte = io::quantized(s.matte);
}

}  // namespace

ImageBuffer procedural_background(std::uint64_t seed, int width, int height) {
  Rng rng(seed);
  struct Wave {
    double fx, fy, phase, amplitude;
  };
  ImageBuffer out(width, height, 3);
  for (int c = 0; c < 3; ++c) {
    std::vector<Wave> waves(4);
    for (auto& w : waves) {
      const double period = rng.uniform(6.0, 48.0);
      const double angle = rng.uniform(0.0, std::numbers::pi);
      w.fx = std::cos(angle) * 2.0 * std::numbers::pi / period;
      w.fy = std::sin(angle) * 2.0 * std::numbers::pi / period;
      w.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      w.amplitude = rng.uniform(0.5, 1.0);
    }
    const int cell = 4 + static_cast<int>(rng.below(13));
    const double checker = rng.uniform(0.2, 0.5);
    double norm = checker;
    for (const auto& w : waves) norm += w.amplitude;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double v = ((x / cell + y / cell) % 2 == 0) ? checker : -checker;
        for (const auto& w : waves) v += w.amplitude * std::sin(w.fx * x + w.fy * y + w.phase);
        out.at(x, y, c) = static_cast<float>(0.5 + 0.45 * v / norm);
      }
    }
  }
  return out;
}

std::vector<fs::path> list_backgrounds(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("background directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (ext == ".png") files.push_back(entry.path());
  }
  if (files.empty()) throw ValidationError("background pool is empty: " + dir.string());
  std::sort(files.begin(), files.end());
  return files;
}

ImageBuffer load_background(const fs::path& path, int width, int height) {
  return resize_bilinear(to_rgb(io::read_png(path)), width, height);
}

RenderedSample render_sample(const render::Scene& scene, const ImageBuffer& background,
                             std::uint64_t seed) {
  const render::RenderPlan plan = render::plan_render(scene);
  RenderedSample r;
  r.scene = scene;
  r.sample.background = io::quantized(background, io::BitDepth::Eight);
  r.sample.matte = render::matte_from_plan(plan);
  r.sample.input = render::image_from_plan(plan, r.sample.background);
  r.sample.seed = seed;
  quantize_sample(r.sample);
  const ImageBuffer recomposited = composite_refractive(r.sample.matte, r.sample.background).image;
  r.self_check_mse = metrics::mse(recomposited, r.sample.input);
  return r;
}

GenerateReport generate_dataset(const DatasetConfig& config, const fs::path& out_dir,
                                unsigned jobs) {
  std::vector<fs::path> pool;
  if (!config.backgrounds.empty()) pool = list_backgrounds(config.backgrounds);

  make_directories(out_dir / "samples");
  {
    std::ostringstream cfg;
    write_config(cfg, config);
    write_text(out_dir / "config.ini", cfg.str());
  }

  const auto schedule = category_schedule(config.count, config.ratios);
  GenerateReport report;
  report.manifest.counts = category_counts(config.count, config.ratios);
  report.manifest.records.resize(config.count);
  std::vector<double> self_check(config.count, 0.0);

  detail::parallel_for(config.count, jobs, [&](std::size_t i) {
    ManifestRecord& rec = report.manifest.records[i];
    rec.id = sample_id(i);
    rec.category = schedule[i];
    rec.seed = mix_seed(config.seed, i);

    const std::uint64_t bg_seed = mix_seed(rec.seed, kBackgroundStream);
    ImageBuffer background;
    if (pool.empty()) {
      background = procedural_background(bg_seed, config.width, config.height);
      rec.background_source = "procedural";
    } else {
      const fs::path& file = pool[Rng(bg_seed).below(pool.size())];
      background = load_background(file, config.width, config.height);
      rec.background_source = file.filename().string();
    }

    const render::Scene scene =
        render::random_scene(rec.category, rec.seed, config.width, config.height);
    RenderedSample rendered = render_sample(scene, background, rec.seed);
    self_check[i] = rendered.self_check_mse;
    if (!(rendered.self_check_mse <= config.self_check_mse)) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "sample %s failed its self-check: MSE %.3g > %.3g",
                    rec.id.c_str(), rendered.self_check_mse, config.self_check_mse);
      throw ValidationError(buf);
    }
    Sample sample = std::move(rendered.sample);
    sample.scene_id = rec.id;
    if (config.augment) {
      sample = augment(sample, config.augment_config);
      quantize_sample(sample);
    }

    const std::string rel = "samples/" + rec.id + "/";
    const fs::path dir = out_dir / "samples" / rec.id;
    make_directories(dir);
    rec.scene = rel + "scene.ini";
    rec.input = rel + "input.png";
    rec.background = rel + "background.png";
    const auto files = io::matte_files(rel);
    rec.mask = files.mask.string();
    rec.attenuation = files.attenuation.string();
    rec.flow = files.flow.string();
    render::write_scene(out_dir / rec.scene, scene);
    io::write_png(out_dir / rec.input, sample.input);
    io::write_png(out_dir / rec.background, sample.background);
    io::write_matte(dir, sample.matte);
  });

  for (double v : self_check) report.worst_self_check_mse = std::max(report.worst_self_check_mse, v);
  std::ostringstream manifest;
  write_manifest(manifest, report.manifest);
  write_text(out_dir / kManifestName, manifest.str());
  return report;
}

Matte extract_directory(const fs::path& capture_dir, const fs::path& out_dir,
                        const graycode::ExtractOptions& options) {
  const graycode::CaptureStack stack = io::read_capture_stack(capture_dir);
  Matte matte = graycode::extract_matte(stack, options);
  make_directories(out_dir);
  io::write_matte(out_dir, matte);
  return matte;
}

void capture_scene(const render::Scene& scene, const fs::path& out_dir, bool complements) {
  const auto patterns =
      graycode::generate_pattern_stack(scene.camera.width, scene.camera.height, complements);
  const auto stack = graycode::render_capture_stack(scene, patterns);
  make_directories(out_dir);
  io::write_capture_stack(out_dir, stack);
}

std::vector<EvalRow> evaluate_dataset(const fs::path& pred_root, const fs::path& dataset_root,
                                      unsigned jobs) {
  const DatasetManifest manifest = read_manifest(dataset_root);
  std::error_code ec;
  if (!fs::is_directory(pred_root, ec)) {
    throw IoError("prediction directory not found: " + pred_root.string());
  }
  std::vector<std::string> predicted;
  for (const auto& entry : fs::directory_iterator(pred_root)) {
    if (entry.is_directory()) predicted.push_back(entry.path().filename().string());
  }
  std::sort(predicted.begin(), predicted.end());
  std::vector<std::string> expected;
  for (const auto& r : manifest.records) expected.push_back(r.id);
  std::sort(expected.begin(), expected.end());
  if (predicted != expected) {
    std::vector<std::string> missing;
    std::vector<std::string> extra;
    std::set_difference(expected.begin(), expected.end(), predicted.begin(), predicted.end(),
                        std::back_inserter(missing));
    std::set_difference(predicted.begin(), predicted.end(), expected.begin(), expected.end(),
                        std::back_inserter(extra));
    throw ValidationError("prediction set differs from the dataset: " +
                          std::to_string(missing.size()) + " missing" +
                          (missing.empty() ? "" : " (first " + missing.front() + ")") + ", " +
                          std::to_string(extra.size()) + " unexpected" +
                          (extra.empty() ? "" : " (first " + extra.front() + ")"));
  }

  const std::size_t n = manifest.records.size();
  std::vector<metrics::EvalReport> pred(n);
  std::vector<metrics::EvalReport> baseline(n);
  detail::parallel_for(n, jobs, [&](std::size_t i) {
    const ManifestRecord& r = manifest.records[i];
    Matte gt;
    gt.mask = io::read_png(dataset_root / r.mask);
    gt.attenuation = io::read_png(dataset_root / r.attenuation);
    gt.flow = io::read_flow(dataset_root / r.flow);
    const ImageBuffer input = io::read_png(dataset_root / r.input);
    const ImageBuffer background = io::read_png(dataset_root / r.background);
    const Matte p = io::read_matte(pred_root / r.id);
    try {
      validate(gt);
      pred[i] = metrics::evaluate(p, gt, background, input);
      baseline[i] = metrics::background_baseline(gt, background, input);
    } catch (const std::invalid_argument& e) {
      throw ValidationError("sample " + r.id + ": " + e.what());
    }
  });

  std::vector<EvalRow> rows;
  rows.reserve(2 * n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    rows.push_back({manifest.records[i].id, "pred", pred[i]});
    rows.push_back({manifest.records[i].id, "background", baseline[i]});
  }
  rows.push_back({"mean", "pred", metrics::mean_report(pred)});
  rows.push_back({"mean", "background", metrics::mean_report(baseline)});
  return rows;
}

void write_eval_csv(std::ostream& out, const std::vector<EvalRow>& rows) {
  out << "id,method,epe_whole,epe_object,mask_iou,attenuation_mse,image_mse,psnr,ssim\n";
  char buf[256];
  for (const auto& row : rows) {
    const auto& r = row.report;
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g", r.epe_whole,
                  r.epe_object, r.mask_iou, r.attenuation_mse, r.image_mse, r.psnr, r.ssim);
    out << row.id << ',' << row.method << ',' << buf << '\n';
  }
}

}  // namespace refmatte::pipeline
