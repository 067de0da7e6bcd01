// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <numeric>
#include <sstream>

#include "refmatte/composite.hpp"
#include "refmatte/errors.hpp"
#include "refmatte/io.hpp"
#include "refmatte/pipeline.hpp"
#include "test_util.hpp"

namespace refmatte::pipeline {
namespace {

namespace fs = std::filesystem;

DatasetConfig parse(const std::string& text, const fs::path& base = {}) {
  std::istringstream in(text);
  return parse_config(in, base);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Every regular file under root, keyed by relative path.
std::map<std::string, std::string> tree_contents(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

DatasetConfig small_config(std::size_t count, std::uint64_t seed) {
  DatasetConfig c;
  c.width = 48;
  c.height = 40;
  c.count = count;
  c.seed = seed;
  return c;
}

TEST(Config, DefaultsAndOverrides) {
  const DatasetConfig d = parse("");
  EXPECT_EQ(d.width, 512);
  EXPECT_EQ(d.count, 100u);
  EXPECT_EQ(d.ratios, kDefaultRatios);
  EXPECT_FALSE(d.augment);

  const DatasetConfig c = parse(
      "[dataset]\nwidth=64\nheight=32\ncount=7\nseed=99\nratios=1 0 0 1\nbackgrounds=bg\n"
      "[augment]\nenabled=true\ncrop_size=16\nnoise_amplitude=0.01\n"
      "[extract]\nambiguity=0.01\n",
      "/data");
  EXPECT_EQ(c.width, 64);
  EXPECT_EQ(c.height, 32);
  EXPECT_EQ(c.count, 7u);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.ratios[1], 0.0);
  EXPECT_EQ(c.backgrounds, fs::path("/data/bg"));
  EXPECT_TRUE(c.augment);
  EXPECT_EQ(c.augment_config.crop_size, 16);
  EXPECT_EQ(c.augment_config.noise_amplitude, 0.01);
  EXPECT_FLOAT_EQ(c.extract.ambiguity, 0.01f);
}

TEST(Config, WriteParseRoundTrip) {
  DatasetConfig c = small_config(5, 1234567890123ull);
  c.ratios = {0.1, 0.2, 0.3, 0.4};
  c.augment = true;
  c.augment_config.crop_size = 32;
  std::ostringstream out;
  write_config(out, c);
  const DatasetConfig back = parse(out.str());
  std::ostringstream again;
  write_config(again, back);
  EXPECT_EQ(again.str(), out.str());
  EXPECT_EQ(back.seed, c.seed);
  EXPECT_EQ(back.ratios, c.ratios);
}

TEST(Config, Rejects) {
  EXPECT_THROW(parse("[dataset]\nwidht=64\n"), std::invalid_argument);
  EXPECT_THROW(parse("[datasets]\nwidth=64\n"), std::invalid_argument);
  EXPECT_THROW(parse("[dataset]\nwidth=8\n"), std::invalid_argument);
  EXPECT_THROW(parse("[dataset]\nwidth=abc\n"), std::invalid_argument);
  EXPECT_THROW(parse("[dataset]\ncount=-1\n"), std::invalid_argument);
  EXPECT_THROW(parse("[dataset]\nratios=0 0 0 0\n"), std::invalid_argument);
  EXPECT_THROW(parse("[dataset]\nratios=1 2 3\n"), std::invalid_argument);
  EXPECT_THROW(parse("[augment]\nenabled=maybe\n"), std::invalid_argument);
  EXPECT_THROW(parse("[augment]\nscale_min=0.5\n"), std::invalid_argument);
  EXPECT_THROW(parse("[dataset]\nwidth=64\nheight=64\n[augment]\nenabled=1\ncrop_size=100\n"),
               std::invalid_argument);
  EXPECT_THROW(read_config("/nonexistent/config.ini"), IoError);
}

TEST(Categories, LargestRemainder) {
  const auto c = category_counts(100, kDefaultRatios);
  EXPECT_EQ(c, (std::array<std::size_t, 4>{29, 15, 11, 45}));
  for (std::size_t n : {0u, 1u, 3u, 17u, 178u, 1000u}) {
    const auto k = category_counts(n, kDefaultRatios);
    EXPECT_EQ(std::accumulate(k.begin(), k.end(), std::size_t{0}), n);
  }
  EXPECT_EQ(category_counts(3, {1, 1, 1, 1}), (std::array<std::size_t, 4>{1, 1, 1, 0}));
  EXPECT_EQ(category_counts(5, {0, 1, 0, 0}), (std::array<std::size_t, 4>{0, 5, 0, 0}));
  const auto schedule = category_schedule(100, kDefaultRatios);
  ASSERT_EQ(schedule.size(), 100u);
  EXPECT_EQ(schedule[0], render::ObjectCategory::Glass);
  EXPECT_EQ(schedule[28], render::ObjectCategory::Glass);
  EXPECT_EQ(schedule[29], render::ObjectCategory::GlassWithWater);
  EXPECT_EQ(schedule[99], render::ObjectCategory::Complex);
}

TEST(Manifest, RoundTrip) {
  DatasetManifest m;
  m.counts = {1, 0, 1, 0};
  m.records.push_back({"000000", render::ObjectCategory::Glass, 42, "procedural", "samples/000000/scene.ini",
                       "samples/000000/input.png", "samples/000000/background.png",
                       "samples/000000/mask.png", "samples/000000/attenuation.png",
                       "samples/000000/flow.flo"});
  m.records.push_back({"000001", render::ObjectCategory::Lens, 18446744073709551615ull, "sky.png",
                       "a", "b", "c", "d", "e", "f"});
  std::ostringstream out;
  write_manifest(out, m);
  std::istringstream in(out.str());
  EXPECT_EQ(parse_manifest(in), m);
  std::istringstream bad("# refmatte dataset manifest v1\nnonsense\n");
  EXPECT_THROW(parse_manifest(bad), std::invalid_argument);
}

TEST(Backgrounds, ProceduralAndPool) {
  const ImageBuffer a = procedural_background(3, 40, 30);
  EXPECT_EQ(a.channels(), 3);
  EXPECT_TRUE(bit_equal(a, procedural_background(3, 40, 30)));
  EXPECT_FALSE(bit_equal(a, procedural_background(4, 40, 30)));
  for (float v : a.data()) ASSERT_TRUE(v >= 0.0f && v <= 1.0f);

  const auto dir = testing::scratch_dir("backgrounds");
  EXPECT_THROW(list_backgrounds(dir), ValidationError);
  EXPECT_THROW(list_backgrounds(dir / "missing"), IoError);
  io::write_png(dir / "b.png", testing::random_image(20, 10, 1, 1));
  io::write_png(dir / "a.png", testing::random_image(20, 10, 3, 2));
  std::ofstream(dir / "notes.txt") << "x";
  const auto pool = list_backgrounds(dir);
  ASSERT_EQ(pool.size(), 2u);
  EXPECT_EQ(pool[0].filename(), "a.png");
  const ImageBuffer gray = load_background(pool[1], 40, 30);
  EXPECT_EQ(gray.channels(), 3);
  EXPECT_EQ(gray.width(), 40);
  EXPECT_EQ(gray.at(5, 5, 0), gray.at(5, 5, 2));
}

TEST(RenderSample, SelfConsistent) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto scene = render::random_scene(render::kAllCategories[seed], seed, 48, 40);
    const RenderedSample r = render_sample(scene, procedural_background(seed, 48, 40), seed);
    EXPECT_LE(r.self_check_mse, 1e-3);
    EXPECT_NO_THROW(validate(r.sample));
    EXPECT_TRUE(bit_equal(r.sample.matte, io::quantized(r.sample.matte)));
  }
}

TEST(Generate, DeterministicAcrossJobs) {
  const auto dir = testing::scratch_dir("generate");
  const DatasetConfig c = small_config(6, 17);
  const GenerateReport one = generate_dataset(c, dir / "a", 1);
  generate_dataset(c, dir / "b", 2);
  EXPECT_EQ(tree_contents(dir / "a"), tree_contents(dir / "b"));
  EXPECT_EQ(one.manifest.records.size(), 6u);
  EXPECT_LE(one.worst_self_check_mse, c.self_check_mse);
  EXPECT_EQ(read_manifest(dir / "a"), one.manifest);

  DatasetConfig other = c;
  other.seed = 18;
  generate_dataset(other, dir / "c", 1);
  EXPECT_NE(slurp(dir / "a" / one.manifest.records[0].input),
            slurp(dir / "c" / one.manifest.records[0].input));

  // Stored samples recomposite to their inputs.
  for (const auto& r : one.manifest.records) {
    const Matte m = io::read_matte(dir / "a" / fs::path(r.mask).parent_path());
    const ImageBuffer bg = io::read_png(dir / "a" / r.background);
    const ImageBuffer in = io::read_png(dir / "a" / r.input);
    const ImageBuffer re = composite_refractive(m, bg).image;
    double e = 0.0;
    for (std::size_t i = 0; i < re.size(); ++i) {
      e += (re.data()[i] - in.data()[i]) * (re.data()[i] - in.data()[i]);
    }
    EXPECT_LE(e / re.size(), c.self_check_mse) << r.id;
  }
}

TEST(Generate, WithAugmentationAndBackgroundPool) {
  const auto dir = testing::scratch_dir("generate_aug");
  fs::create_directories(dir / "pool");
  io::write_png(dir / "pool" / "one.png", testing::random_image(30, 30, 3, 1));
  DatasetConfig c = small_config(3, 5);
  c.backgrounds = dir / "pool";
  c.augment = true;
  c.augment_config.crop_size = 32;
  const GenerateReport r = generate_dataset(c, dir / "out", 1);
  for (const auto& rec : r.manifest.records) {
    EXPECT_EQ(rec.background_source, "one.png");
    const ImageBuffer in = io::read_png(dir / "out" / rec.input);
    EXPECT_EQ(in.width(), 32);
    EXPECT_EQ(in.height(), 32);
  }
}

TEST(Generate, EmptyDataset) {
  const auto dir = testing::scratch_dir("generate_empty");
  const GenerateReport r = generate_dataset(small_config(0, 1), dir / "out", 1);
  EXPECT_TRUE(r.manifest.records.empty());
  EXPECT_TRUE(read_manifest(dir / "out").records.empty());
}

TEST(Evaluate, PredictionEqualToTruth) {
  const auto dir = testing::scratch_dir("evaluate");
  const GenerateReport g = generate_dataset(small_config(4, 2), dir / "data", 1);
  const auto rows = evaluate_dataset(dir / "data" / "samples", dir / "data", 2);
  ASSERT_EQ(rows.size(), 2u * 4u + 2u);
  std::vector<metrics::EvalReport> preds;
  for (const auto& row : rows) {
    if (row.method == "pred" && row.id != "mean") {
      EXPECT_EQ(row.report.epe_whole, 0.0);
      EXPECT_EQ(row.report.mask_iou, 1.0);
      EXPECT_EQ(row.report.attenuation_mse, 0.0);
      preds.push_back(row.report);
    }
  }
  ASSERT_EQ(preds.size(), 4u);
  int baselines = 0;
  for (const auto& row : rows) baselines += row.method == "background" ? 1 : 0;
  EXPECT_EQ(baselines, 5);
  const auto& mean_pred = *std::find_if(rows.begin(), rows.end(), [](const EvalRow& r) {
    return r.id == "mean" && r.method == "pred";
  });
  EXPECT_NEAR(mean_pred.report.image_mse, metrics::mean_report(preds).image_mse, 1e-15);

  std::ostringstream csv;
  write_eval_csv(csv, rows);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')),
            "id,method,epe_whole,epe_object,mask_iou,attenuation_mse,image_mse,psnr,ssim");

  fs::remove_all(dir / "data" / "samples" / g.manifest.records[1].id);
  EXPECT_THROW(read_manifest(dir / "data"), ValidationError);
}

TEST(Evaluate, MismatchedPredictionSet) {
  const auto dir = testing::scratch_dir("evaluate_mismatch");
  generate_dataset(small_config(2, 3), dir / "data", 1);
  fs::create_directories(dir / "pred" / "000000");
  EXPECT_THROW(evaluate_dataset(dir / "pred", dir / "data"), ValidationError);
}

// ---- command line ------------------------------------------------------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(REFMATTE_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const auto dir = testing::scratch_dir("cli");
  const std::string d = dir.string();
  std::ofstream(dir / "bad.ini") << "[dataset]\nwidth=banana\n";
  std::ofstream(dir / "ok.ini") << "[dataset]\nwidth=32\nheight=32\ncount=2\n";
  std::ofstream(dir / "pool.ini") << "[dataset]\nwidth=32\nheight=32\ncount=2\nbackgrounds=empty\n";
  fs::create_directories(dir / "empty");
  std::ofstream(dir / "blocker") << "file, not a directory";

  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("generate"), 2);
  EXPECT_EQ(run_cli("generate --config " + d + "/bad.ini --out " + d + "/x"), 2);
  EXPECT_EQ(run_cli("generate --config " + d + "/ok.ini --out " + d + "/blocker/out"), 3);
  EXPECT_EQ(run_cli("generate --config " + d + "/pool.ini --out " + d + "/p"), 4);
  EXPECT_EQ(run_cli("generate --config " + d + "/ok.ini --count 0 --out " + d + "/zero"), 0);
  EXPECT_TRUE(read_manifest(dir / "zero").records.empty());
  EXPECT_EQ(run_cli("generate --config " + d + "/ok.ini --seed 4 --out " + d + "/g1"), 0);
  EXPECT_EQ(run_cli("generate --config " + d + "/ok.ini --seed 4 --out " + d + "/g2"), 0);
  EXPECT_EQ(tree_contents(dir / "g1"), tree_contents(dir / "g2"));

  EXPECT_EQ(run_cli("evaluate --pred " + d + "/g1/samples --dataset " + d + "/g1 --out " + d + "/eval.csv"), 0);
  EXPECT_NE(slurp(dir / "eval.csv").find("mean,pred"), std::string::npos);
  EXPECT_EQ(run_cli("evaluate --pred " + d + "/empty --dataset " + d + "/g1"), 4);
}

TEST(Cli, CaptureExtractComposite) {
  const auto dir = testing::scratch_dir("cli_capture");
  const std::string d = dir.string();
  const auto scene = render::random_scene(render::ObjectCategory::Lens, 2, 32, 32);
  render::write_scene(dir / "scene.ini", scene);
  ASSERT_EQ(run_cli("capture --scene " + d + "/scene.ini --out " + d + "/cap"), 0);
  ASSERT_EQ(run_cli("extract --capture " + d + "/cap --out " + d + "/matte"), 0);
  const Matte m = io::read_matte(dir / "matte");
  EXPECT_EQ(m.width(), 32);
  double covered = 0.0;
  for (float v : m.mask.data()) covered += v;
  EXPECT_GT(covered, 10.0);

  // An all-transparent matte copies the background.
  fs::create_directories(dir / "zero");
  io::write_matte(dir / "zero", Matte::empty(32, 32));
  const ImageBuffer bg = io::quantized(testing::random_image(32, 32, 3, 1), io::BitDepth::Eight);
  io::write_png(dir / "bg.png", bg);
  ASSERT_EQ(run_cli("composite --matte " + d + "/zero --background " + d + "/bg.png --out " + d + "/c.png"), 0);
  EXPECT_TRUE(bit_equal(io::read_png(dir / "c.png"), bg));
  EXPECT_EQ(run_cli("composite --matte " + d + "/nowhere --background " + d + "/bg.png --out " + d + "/c.png"), 3);
  std::ofstream(dir / "bad_scene.ini") << "[camera]\nwidth=oops\n";
  EXPECT_EQ(run_cli("capture --scene " + d + "/bad_scene.ini --out " + d + "/cap2"), 2);
}

}  // namespace
}  // namespace refmatte::pipeline
