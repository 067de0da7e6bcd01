// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "refmatte/image.hpp"

namespace refmatte::metrics {

struct CoarseWeights {
  double mask = 0.1;
  double attenuation = 1.0;
  double flow = 0.01;
  double reconstruction = 1.0;
};

struct RefineWeights {
  double attenuation = 1.0;
  double flow = 1.0;
};

/// Supervision weight of decoder scale s in {1,2,3,4}: 1 / 2^(4 - s).
constexpr double scale_weight(int s) { return 1.0 / static_cast<double>(1 << (4 - s)); }

struct LossWeights {
  CoarseWeights coarse;
  RefineWeights refine;
  std::array<double, 4> scales{scale_weight(1), scale_weight(2), scale_weight(3), scale_weight(4)};
};

/// Probabilities are clamped to [eps, 1 - eps] before taking logs.
inline constexpr double kCrossEntropyEpsilon = 1e-7;
/// PSNR reported for identical images.
inline constexpr double kPsnrCap = 99.0;

/// Binary cross-entropy, -mean(M log P + (1 - M) log(1 - P)).
double loss_mask_ce(const ImageBuffer& probability, const ImageBuffer& gt_mask);

/// Mean squared difference over all samples.
double loss_attenuation(const ImageBuffer& pred, const ImageBuffer& gt);

struct EpeResult {
  double value = 0.0;
  std::size_t pixels = 0;
  bool empty_mask = false;  // value is 0 by definition
};

/// Mean end-point error, optionally restricted to pixels where mask > 0.5.
EpeResult loss_flow_epe(const FlowField& pred, const FlowField& gt, const ImageBuffer* mask = nullptr);

/// Squared L2 norm of the per-pixel colour difference, averaged over pixels
/// (so a constant gap g on C channels gives C * g^2).
double loss_reconstruction(const ImageBuffer& reconstructed, const ImageBuffer& input);

struct CoarseTerms {
  double mask = 0.0;
  double attenuation = 0.0;
  double flow = 0.0;
  double reconstruction = 0.0;
};

/// Throws std::invalid_argument for negative or non-finite terms.
double coarse_loss(const CoarseTerms& terms, const CoarseWeights& weights = {});
double multiscale_loss(std::span<const double, 4> per_scale);
double refine_loss(double attenuation, double flow, const RefineWeights& weights = {});

/// IoU of masks binarized at 0.5; two empty masks give 1.
double mask_iou(const ImageBuffer& pred, const ImageBuffer& gt);

/// Mean squared error over all samples.
double mse(const ImageBuffer& a, const ImageBuffer& b);
double psnr(const ImageBuffer& a, const ImageBuffer& b, double peak = 1.0);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

/// Mean SSIM over all fully-contained Gaussian windows, averaged over channels.
/// Throws std::invalid_argument when the image is smaller than the window.
double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params = {});

struct EvalReport {
  double epe_whole = 0.0;
  double epe_object = 0.0;
  double mask_iou = 0.0;
  double attenuation_mse = 0.0;
  double image_mse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
};

/// Scores a predicted matte against the ground truth. EPE skips pixels whose
/// ground-truth flow is invalid; the object region is the ground-truth mask.
/// The reconstruction is composite_refractive(pred, background) against input.
EvalReport evaluate(const Matte& pred, const Matte& gt, const ImageBuffer& background,
                    const ImageBuffer& input);

/// Scores the zero matte (whole image as mask, no attenuation, no flow).
EvalReport background_baseline(const Matte& gt, const ImageBuffer& background,
                               const ImageBuffer& input);

EvalReport mean_report(std::span<const EvalReport> reports);

}  // namespace refmatte::metrics
