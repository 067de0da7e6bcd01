// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include "refmatte/metrics.hpp"

#include <algorithm>
#include <array>
#include <utility>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "refmatte/composite.hpp"
#include "refmatte/simd/kernels.hpp"

namespace refmatte::metrics {
namespace {

void require_same_shape(const ImageBuffer& a, const ImageBuffer& b, const char* what) {
  if (!a.same_shape(b) || a.empty()) {
    throw std::invalid_argument(std::string(what) + ": image shapes differ");
  }
}

void require_finite_nonnegative(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw std::invalid_argument(std::string(what) + ": loss terms must be finite and >= 0");
  }
}

EpeResult endpoint_error(const FlowField& pred, const FlowField& gt, const std::uint8_t* include) {
  const auto s = simd::kernels().sum_endpoint_error(
      pred.dx_plane().data(), pred.dy_plane().data(), gt.dx_plane().data(), gt.dy_plane().data(),
      include, pred.pixel_count());
  EpeResult r;
  r.pixels = s.count;
  r.empty_mask = s.count == 0;
  r.value = s.count == 0 ? 0.0 : s.sum / static_cast<double>(s.count);
  return r;
}

// Separable "valid" convolution with a 1-D kernel.
std::vector<double> filter_valid(const std::vector<double>& src, int w, int h,
                                 const std::vector<double>& kernel) {
  const int k = static_cast<int>(kernel.size());
  const int ow = w - k + 1;
  const int oh = h - k + 1;
  std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += kernel[i] * src[static_cast<std::size_t>(y) * w + x + i];
      tmp[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < k; ++i) acc += kernel[i] * tmp[static_cast<std::size_t>(y + i) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double loss_mask_ce(const ImageBuffer& probability, const ImageBuffer& gt_mask) {
  require_same_shape(probability, gt_mask, "loss_mask_ce");
  const auto p = probability.data();
  const auto m = gt_mask.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double q = std::clamp(static_cast<double>(p[i]), kCrossEntropyEpsilon,
                                1.0 - kCrossEntropyEpsilon);
    const double t = m[i];
    sum += t * std::log(q) + (1.0 - t) * std::log(1.0 - q);
  }
  return -sum / static_cast<double>(p.size());
}

double loss_attenuation(const ImageBuffer& pred, const ImageBuffer& gt) {
  require_same_shape(pred, gt, "loss_attenuation");
  return mse(pred, gt);
}

EpeResult loss_flow_epe(const FlowField& pred, const FlowField& gt, const ImageBuffer* mask) {
  if (pred.width() != gt.width() || pred.height() != gt.height() || pred.pixel_count() == 0) {
    throw std::invalid_argument("loss_flow_epe: flow sizes differ");
  }
  if (mask == nullptr) return endpoint_error(pred, gt, nullptr);
  if (!mask->same_size(gt.width(), gt.height()) || mask->channels() != 1) {
    throw std::invalid_argument("loss_flow_epe: mask size differs");
  }
  std::vector<std::uint8_t> include(gt.pixel_count());
  const auto m = mask->data();
  for (std::size_t i = 0; i < include.size(); ++i) include[i] = m[i] > 0.5f ? 1 : 0;
  return endpoint_error(pred, gt, include.data());
}

double loss_reconstruction(const ImageBuffer& reconstructed, const ImageBuffer& input) {
  require_same_shape(reconstructed, input, "loss_reconstruction");
  const double sum = simd::kernels().sum_squared_diff(reconstructed.data().data(),
                                                      input.data().data(), input.size());
  return sum / static_cast<double>(input.pixel_count());
}

double coarse_loss(const CoarseTerms& t, const CoarseWeights& w) {
  require_finite_nonnegative(t.mask, "coarse_loss");
  require_finite_nonnegative(t.attenuation, "coarse_loss");
  require_finite_nonnegative(t.flow, "coarse_loss");
  require_finite_nonnegative(t.reconstruction, "coarse_loss");
  // Largest weights first: unit terms then give the decimal sum of the weights.
  std::array<std::pair<double, double>, 4> parts{{{w.mask, t.mask},
                                                   {w.attenuation, t.attenuation},
                                                   {w.flow, t.flow},
                                                   {w.reconstruction, t.reconstruction}}};
  std::stable_sort(parts.begin(), parts.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  double sum = 0.0;
  for (const auto& [weight, term] : parts) sum += weight * term;
  return sum;
}

double multiscale_loss(std::span<const double, 4> per_scale) {
  double sum = 0.0;
  for (int s = 1; s <= 4; ++s) {
    require_finite_nonnegative(per_scale[s - 1], "multiscale_loss");
    sum += scale_weight(s) * per_scale[s - 1];
  }
  return sum;
}

double refine_loss(double attenuation, double flow, const RefineWeights& w) {
  require_finite_nonnegative(attenuation, "refine_loss");
  require_finite_nonnegative(flow, "refine_loss");
  return w.attenuation * attenuation + w.flow * flow;
}

double mask_iou(const ImageBuffer& pred, const ImageBuffer& gt) {
  require_same_shape(pred, gt, "mask_iou");
  const auto p = pred.data();
  const auto g = gt.data();
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool a = p[i] > 0.5f;
    const bool b = g[i] > 0.5f;
    inter += (a && b) ? 1 : 0;
    uni += (a || b) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double mse(const ImageBuffer& a, const ImageBuffer& b) {
  require_same_shape(a, b, "mse");
  return simd::kernels().sum_squared_diff(a.data().data(), b.data().data(), a.size()) /
         static_cast<double>(a.size());
}

double psnr(const ImageBuffer& a, const ImageBuffer& b, double peak) {
  const double e = mse(a, b);
  if (e == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / e));
}

double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params) {
  require_same_shape(a, b, "ssim");
  const int w = a.width();
  const int h = a.height();
  const int k = params.window;
  if (w < k || h < k) throw std::invalid_argument("ssim: image smaller than the window");

  std::vector<double> kernel(k);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    const double d = i - (k - 1) / 2.0;
    kernel[i] = std::exp(-(d * d) / (2.0 * params.sigma * params.sigma));
    total += kernel[i];
  }
  for (double& v : kernel) v /= total;

  const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
  const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);
  const std::size_t n = a.pixel_count();
  const int channels = a.channels();
  double channel_sum = 0.0;
  std::vector<double> va(n), vb(n), aa(n), bb(n), ab(n);
  for (int c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      va[i] = a.data()[i * channels + c];
      vb[i] = b.data()[i * channels + c];
      aa[i] = va[i] * va[i];
      bb[i] = vb[i] * vb[i];
      ab[i] = va[i] * vb[i];
    }
    const auto mu_a = filter_valid(va, w, h, kernel);
    const auto mu_b = filter_valid(vb, w, h, kernel);
    const auto e_aa = filter_valid(aa, w, h, kernel);
    const auto e_bb = filter_valid(bb, w, h, kernel);
    const auto e_ab = filter_valid(ab, w, h, kernel);
    double sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double ma = mu_a[i];
      const double mb = mu_b[i];
      const double var_a = e_aa[i] - ma * ma;
      const double var_b = e_bb[i] - mb * mb;
      const double cov = e_ab[i] - ma * mb;
      sum += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) /
             ((ma * ma + mb * mb + c1) * (var_a + var_b + c2));
    }
    channel_sum += sum / static_cast<double>(mu_a.size());
  }
  return channel_sum / channels;
}

EvalReport evaluate(const Matte& pred, const Matte& gt, const ImageBuffer& background,
                    const ImageBuffer& input) {
  const int w = gt.width();
  const int h = gt.height();
  if (pred.width() != w || pred.height() != h || !background.same_size(w, h) ||
      !input.same_shape(background)) {
    throw std::invalid_argument("evaluate: sample members differ in size");
  }
  EvalReport r;
  const std::size_t n = gt.flow.pixel_count();
  std::vector<std::uint8_t> whole(n);
  std::vector<std::uint8_t> object(n);
  const auto valid = gt.flow.valid_plane();
  const auto m = gt.mask.data();
  for (std::size_t i = 0; i < n; ++i) {
    whole[i] = valid[i];
    object[i] = valid[i] && m[i] > 0.5f ? 1 : 0;
  }
  r.epe_whole = endpoint_error(pred.flow, gt.flow, whole.data()).value;
  r.epe_object = endpoint_error(pred.flow, gt.flow, object.data()).value;
  r.mask_iou = mask_iou(pred.mask, gt.mask);
  r.attenuation_mse = mse(pred.attenuation, gt.attenuation);
  const ImageBuffer reconstructed = composite_refractive(pred, background).image;
  r.image_mse = loss_reconstruction(reconstructed, input);
  r.psnr = psnr(reconstructed, input);
  r.ssim = ssim(reconstructed, input);
  return r;
}

EvalReport background_baseline(const Matte& gt, const ImageBuffer& background,
                               const ImageBuffer& input) {
  return evaluate(Matte::identity(gt.width(), gt.height()), gt, background, input);
}

EvalReport mean_report(std::span<const EvalReport> reports) {
  EvalReport mean;
  if (reports.empty()) return mean;
  for (const auto& r : reports) {
    mean.epe_whole += r.epe_whole;
    mean.epe_object += r.epe_object;
    mean.mask_iou += r.mask_iou;
    mean.attenuation_mse += r.attenuation_mse;
    mean.image_mse += r.image_mse;
    mean.psnr += r.psnr;
    mean.ssim += r.ssim;
  }
  const double inv = 1.0 / static_cast<double>(reports.size());
  mean.epe_whole *= inv;
  mean.epe_object *= inv;
  mean.mask_iou *= inv;
  mean.attenuation_mse *= inv;
  mean.image_mse *= inv;
  mean.psnr *= inv;
  mean.ssim *= inv;
  return mean;
}

}  // namespace refmatte::metrics
