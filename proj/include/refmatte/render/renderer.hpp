// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "refmatte/image.hpp"
#include "refmatte/render/scene.hpp"

namespace refmatte::render {

enum class ExitStatus {
  Missed,              // ray never entered the object
  Valid,               // landed on the background plane
  TotalInternalReflection,
  ParallelToPlane,     // exit ray does not reach the plane
  TooManyInterfaces,
};

struct Interface {
  Vec3 point;          // camera frame
  Vec3 normal;         // camera frame, facing the incoming ray
  Vec3 incoming;       // camera frame
  Vec3 outgoing;       // camera frame; undefined after TIR
  double n1 = 1.0;
  double n2 = 1.0;
  double transmittance = 1.0;
};

struct TracePath {
  ExitStatus status = ExitStatus::Missed;
  std::vector<Interface> interfaces;
  Vec3 exit_origin;     // camera frame, last interface point (or camera centre on a miss)
  Vec3 exit_direction;  // camera frame
  double transmittance = 1.0;
  double exit_u = 0.0;  // background pixel coordinates, valid when status == Valid
  double exit_v = 0.0;
};

/// Full interface-by-interface trace of the camera ray through (x, y).
TracePath trace_path(const Scene& scene, double x, double y);

struct TraceResult {
  bool hit = false;
  bool exit_valid = false;
  double exit_u = 0.0;
  double exit_v = 0.0;
  double transmittance = 1.0;
  ExitStatus status = ExitStatus::Missed;
};

/// Throws std::invalid_argument if (x, y) lies outside the image.
TraceResult trace_ray(const Scene& scene, double x, double y);

/// Per-pixel ray samples for a scene: one at the pixel centre for interior
/// pixels, four at (+-1/4, +-1/4) for pixels on the mask boundary.
struct RenderPlan {
  struct Sample {
    float x = 0.0f;
    float y = 0.0f;
    bool hit = false;
    bool exit_valid = false;
    double exit_u = 0.0;
    double exit_v = 0.0;
    double transmittance = 1.0;
  };
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> offsets;  // width*height + 1 entries into samples
  std::vector<Sample> samples;

  std::uint32_t sample_count(int x, int y) const {
    const std::size_t i = static_cast<std::size_t>(y) * width + x;
    return offsets[i + 1] - offsets[i];
  }
  bool supersampled(int x, int y) const { return sample_count(x, y) > 1; }
};

/// Throws std::invalid_argument for an invalid scene.
RenderPlan plan_render(const Scene& scene);

Matte matte_from_plan(const RenderPlan& plan);
/// Direct render of the plan over a background (same size as the camera image).
ImageBuffer image_from_plan(const RenderPlan& plan, const ImageBuffer& background);
/// The object drawn white over black: the soft coverage of each pixel.
ImageBuffer coverage_from_plan(const RenderPlan& plan);

Matte render_ground_truth_matte(const Scene& scene);
ImageBuffer render_scene_image(const Scene& scene, const ImageBuffer& background);

}  // namespace refmatte::render
