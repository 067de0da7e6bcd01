// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "refmatte/augment.hpp"
#include "refmatte/composite.hpp"
#include "refmatte/graycode.hpp"
#include "refmatte/io.hpp"
#include "refmatte/metrics.hpp"
#include "refmatte/pipeline.hpp"
#include "refmatte/render/renderer.hpp"
#include "refmatte/render/scene_file.hpp"
#include "refmatte/simd/kernels.hpp"
#include "test_util.hpp"

namespace {

using namespace refmatte;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double percentile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::infinity();
  const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
  const auto idx = std::min(k, v.size() - 1);
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(idx), v.end());
  return v[idx];
}

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// Smooth field vanishing on the border so every target stays inside the frame.
FlowField smooth_flow(int w, int h, double max_magnitude) {
  std::vector<double> fx(static_cast<std::size_t>(w) * h);
  std::vector<double> fy(fx.size());
  double peak = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = static_cast<double>(x) / (w - 1);
      const double v = static_cast<double>(y) / (h - 1);
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      fx[i] = std::sin(std::numbers::pi * u) * std::cos(2.0 * std::numbers::pi * v);
      fy[i] = std::sin(std::numbers::pi * v) * std::sin(2.0 * std::numbers::pi * u + 0.7);
      peak = std::max(peak, std::hypot(fx[i], fy[i]));
    }
  }
  // The sine factors keep |d| below the distance to the border once scaled,
  // as long as the scale stays under (w-1)/pi.
  const double scale = max_magnitude / peak;
  FlowField f(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      f.set(x, y, static_cast<float>(scale * fx[i]), static_cast<float>(scale * fy[i]));
    }
  }
  return f;
}

Outcome graycode_round_trip() {
  const int size = 512;
  const FlowField truth = smooth_flow(size, size, 30.0);
  const auto start = std::chrono::steady_clock::now();
  const auto patterns = graycode::generate_pattern_stack(size, size, true);
  const Matte m = graycode::extract_matte(graycode::warp_capture_stack(patterns, truth));
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  double max_mag = 0.0;
  bool in_bounds = true;
  std::vector<double> epe;
  epe.reserve(truth.pixel_count());
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double tx = x + truth.dx(x, y);
      const double ty = y + truth.dy(x, y);
      in_bounds &= tx >= 0 && tx <= size - 1 && ty >= 0 && ty <= size - 1;
      max_mag = std::max(max_mag, std::hypot(double{truth.dx(x, y)}, double{truth.dy(x, y)}));
      // Undecodable pixels count as unbounded error.
      epe.push_back(m.flow.valid(x, y) ? std::hypot(double{m.flow.dx(x, y)} - truth.dx(x, y),
                                                    double{m.flow.dy(x, y)} - truth.dy(x, y))
                                       : std::numeric_limits<double>::infinity());
    }
  }
  const double median = percentile(epe, 0.5);
  const double p95 = percentile(epe, 0.95);
  Outcome o;
  o.pass = in_bounds && median <= 0.75 && p95 <= 1.5 && seconds < 10.0;
  o.detail = format("512x512, max |flow| %.2f px, median EPE %.4f (<= 0.75), p95 %.4f (<= 1.5), %.2f s (< 10)",
                    max_mag, median, p95, seconds);
  return o;
}

Outcome renderer_codec() {
  const int size = 256;
  const render::PrimitiveKind kinds[] = {render::PrimitiveKind::Slab, render::PrimitiveKind::Sphere,
                                         render::PrimitiveKind::Lens};
  const auto patterns = graycode::generate_pattern_stack(size, size, true);
  std::vector<double> epe;
  double worst_scene = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto scene = render::random_primitive_scene(kinds[i % 3], 1000 + i, size, size);
    const Matte gt = render::render_ground_truth_matte(scene);
    const Matte m = graycode::extract_matte(graycode::render_capture_stack(scene, patterns));
    std::vector<double> scene_epe;
    for (int y = 0; y < size; ++y) {
      for (int x = 0; x < size; ++x) {
        if (!(gt.mask.at(x, y) > 0.5f) || !gt.flow.valid(x, y) || !m.flow.valid(x, y)) continue;
        scene_epe.push_back(std::hypot(double{m.flow.dx(x, y)} - gt.flow.dx(x, y),
                                       double{m.flow.dy(x, y)} - gt.flow.dy(x, y)));
      }
    }
    worst_scene = std::max(worst_scene, percentile(scene_epe, 0.5));
    epe.insert(epe.end(), scene_epe.begin(), scene_epe.end());
  }
  const double median = percentile(epe, 0.5);
  Outcome o;
  o.pass = median <= 1.0 && epe.size() > 1000;
  o.detail = format("10 slab/sphere/lens scenes at %dx%d, %zu pixels, median EPE %.4f (<= 1.0), worst scene median %.4f",
                    size, size, epe.size(), median, worst_scene);
  return o;
}

Outcome self_consistency() {
  const int w = 128;
  const int h = 96;
  double worst = 0.0;
  std::size_t pixels = 0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto scene = render::random_scene(render::kAllCategories[i % 4], 2000 + i, w, h);
    const ImageBuffer bg = pipeline::procedural_background(i, w, h);
    const auto plan = render::plan_render(scene);
    const ImageBuffer direct = render::image_from_plan(plan, bg);
    const Matte matte = render::matte_from_plan(plan);
    const ImageBuffer comp = composite_refractive(matte, bg).image;
    double sum = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (plan.supersampled(x, y) || !matte.flow.valid(x, y)) continue;
        for (int c = 0; c < 3; ++c) {
          const double d = direct.at(x, y, c) - comp.at(x, y, c);
          sum += d * d;
        }
        ++n;
      }
    }
    pixels += n;
    worst = std::max(worst, sum / (3.0 * static_cast<double>(n)));
  }
  Outcome o;
  o.pass = worst <= 1e-3;
  o.detail = format("20 scenes, %zu interior pixels, worst per-scene MSE %.3g (<= 1e-3)", pixels, worst);
  return o;
}

Outcome analytic_slab() {
  const double thickness = 1.0;
  double worst = 0.0;
  double worst_parallel = 0.0;
  std::size_t fewest = std::numeric_limits<std::size_t>::max();
  for (int theta = 10; theta <= 70; theta += 10) {
    for (double n : {1.3, 1.4, 1.5}) {
      const auto c = testing::check_tilted_slab(theta, n, thickness);
      worst = std::max(worst, c.max_error);
      worst_parallel = std::max(worst_parallel, c.max_parallel);
      fewest = std::min<std::size_t>(fewest, c.pixels);
    }
  }
  Outcome o;
  o.pass = worst <= 1e-3 * thickness && fewest > 0;
  o.detail = format("theta 10..70 deg x n {1.3,1.4,1.5}, worst displacement error %.3g t (<= 1e-3 t), "
                    "exit/entry parallelism %.2g, >= %zu pixels per case",
                    worst / thickness, worst_parallel, fewest);
  return o;
}

Outcome metric_exactness() {
  using namespace metrics;
  FlowField zero(16, 16);
  FlowField uniform(16, 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) uniform.set(x, y, 3.0f, 4.0f);
  }
  const double epe = loss_flow_epe(uniform, zero).value;
  const double ce = loss_mask_ce(ImageBuffer(16, 16, 1, 0.5f), ImageBuffer(16, 16, 1, 1.0f));
  // One pixel in 25 off by 0.5: the squared errors are exact, so MSE is 0.01.
  ImageBuffer a(25, 4, 1, 0.25f);
  ImageBuffer b = a;
  for (int y = 0; y < 4; ++y) b.at(7, y) = 0.75f;
  const double e = mse(a, b);
  const double p = psnr(a, b);
  const ImageBuffer img = testing::random_image(32, 32, 3, 5);
  const double s = ssim(img, img);
  const double coarse = coarse_loss({1, 1, 1, 1});
  const std::array<double, 4> ones{1, 1, 1, 1};
  const double multi = multiscale_loss(ones);
  Outcome o;
  o.pass = std::abs(epe - 5.0) <= 1e-9 && std::abs(ce - std::numbers::ln2) <= 1e-9 &&
           e == 0.01 && std::abs(p - 20.0) <= 1e-9 && s == 1.0 &&
           coarse == 2.11 && multi == 1.875;
  o.detail = format("EPE %.12f, CE %.12f, PSNR %.12f dB at MSE %.17g, SSIM(a,a) %.15f, coarse %.17g, multiscale %.17g",
                    epe, ce, p, e, s, coarse, multi);
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

Outcome augmentation_algebra() {
  bool involution = true;
  bool covariance = true;
  for (std::uint64_t i = 0; i < 8; ++i) {
    const auto scene = render::random_scene(render::kAllCategories[i % 4], 3000 + i, 64, 48);
    const auto r = pipeline::render_sample(scene, pipeline::procedural_background(i, 64, 48), i);
    const Sample& s = r.sample;
    involution &= bit_equal(flip_horizontal(flip_horizontal(s)), s);
    involution &= bit_equal(flip_vertical(flip_vertical(s)), s);
    const Sample fh = flip_horizontal(s);
    const Sample fv = flip_vertical(s);
    const auto& f = s.matte.flow;
    for (int y = 0; y < 48; ++y) {
      for (int x = 0; x < 64; ++x) {
        const int mx = 63 - x;
        const int my = 47 - y;
        covariance &= fh.matte.flow.valid(mx, y) == f.valid(x, y) &&
                      fv.matte.flow.valid(x, my) == f.valid(x, y);
        if (!f.valid(x, y)) continue;
        covariance &= fh.matte.flow.dx(mx, y) == -f.dx(x, y) && fh.matte.flow.dy(mx, y) == f.dy(x, y);
        covariance &= fv.matte.flow.dx(x, my) == f.dx(x, y) && fv.matte.flow.dy(x, my) == -f.dy(x, y);
      }
    }
  }
  const fs::path root = fs::temp_directory_path() / "refmatte_acceptance_generate";
  fs::remove_all(root);
  pipeline::DatasetConfig config;
  config.width = 96;
  config.height = 96;
  config.count = 8;
  config.seed = 2017;
  config.augment = true;
  config.augment_config.crop_size = 80;
  pipeline::generate_dataset(config, root / "first", 1);
  pipeline::generate_dataset(config, root / "second", 1);
  const auto first = tree_contents(root / "first");
  const bool identical = first == tree_contents(root / "second");
  fs::remove_all(root);
  Outcome o;
  o.pass = involution && covariance && identical;
  o.detail = format("flip involutions %s, flow sign covariance %s, repeated generate (%zu files, augmented) %s",
                    involution ? "bit-exact" : "BROKEN", covariance ? "holds" : "BROKEN",
                    first.size(), identical ? "byte-identical" : "DIFFER");
  return o;
}

Outcome format_round_trips() {
  const fs::path dir = fs::temp_directory_path() / "refmatte_acceptance_formats";
  fs::remove_all(dir);
  fs::create_directories(dir);
  int flow_ok = 0;
  int png_ok = 0;
  int files_ok = 0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const int w = 1 + static_cast<int>(i * 7 % 61);
    const int h = 1 + static_cast<int>(i * 13 % 47);
    const Matte m = testing::random_matte(w, h, 4000 + i, true, 50.0f);
    io::write_flow(dir / "f.flo", m.flow);
    flow_ok += bit_equal(io::read_flow(dir / "f.flo"), m.flow) ? 1 : 0;
    const ImageBuffer rgb = io::quantized(testing::random_image(w, h, 3, 5000 + i), io::BitDepth::Eight);
    io::write_png(dir / "m.png", m.mask, io::BitDepth::Eight);
    io::write_png(dir / "a.png", m.attenuation, io::BitDepth::Sixteen);
    io::write_png(dir / "c.png", rgb, io::BitDepth::Eight);
    const bool png = bit_equal(io::read_png(dir / "m.png"), m.mask) &&
                     bit_equal(io::read_png(dir / "a.png"), m.attenuation) &&
                     bit_equal(io::read_png(dir / "c.png"), rgb);
    png_ok += png ? 1 : 0;
    // write . read on the files themselves.
    const std::string flo = slurp(dir / "f.flo");
    const std::string png16 = slurp(dir / "a.png");
    io::write_flow(dir / "f.flo", io::read_flow(dir / "f.flo"));
    io::write_png(dir / "a.png", io::read_png(dir / "a.png"), io::BitDepth::Sixteen);
    files_ok += flo == slurp(dir / "f.flo") && png16 == slurp(dir / "a.png") ? 1 : 0;
  }
  fs::remove_all(dir);
  Outcome o;
  o.pass = flow_ok == 100 && png_ok == 100 && files_ok == 100;
  o.detail = format("100 random mattes: flow %d/100, PNG %d/100, file bytes %d/100 bit-exact",
                    flow_ok, png_ok, files_ok);
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"graycode-round-trip", graycode_round_trip},
      {"renderer-codec-cross-validation", renderer_codec},
      {"renderer-compositor-self-consistency", self_consistency},
      {"analytic-slab-refraction", analytic_slab},
      {"metric-loss-exactness", metric_exactness},
      {"augmentation-algebra", augmentation_algebra},
      {"format-round-trips", format_round_trips},
  };
  std::printf("simd backend: %s\n", std::string(simd::backend_name(simd::active_backend())).c_str());
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
