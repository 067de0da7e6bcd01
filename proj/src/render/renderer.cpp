// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include "refmatte/render/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "../simd/bilinear_inl.hpp"

namespace refmatte::render {
namespace {

constexpr int kMaxInterfaces = 32;
// Offset used to leave a surface and to probe the medium beyond it. Larger than
// the surface-of-revolution root tolerance.
constexpr double kSurfaceEpsilon = 1e-5;
constexpr double kAirIndex = 1.0;

double medium_index(const TransparentObject& obj, const Vec3& p) {
  if (obj.filling && contains(obj.filling->shape, p)) return obj.filling->refractive_index;
  if (contains(obj.shape, p)) return obj.refractive_index;
  return kAirIndex;
}

std::optional<ShapeHit> nearest_hit(const TransparentObject& obj, const Ray& ray, double t_min) {
  auto hit = intersect(obj.shape, ray, t_min);
  if (obj.filling) {
    auto inner = intersect(obj.filling->shape, ray, t_min);
    if (inner && (!hit || inner->t < hit->t)) hit = inner;
  }
  return hit;
}

void land_on_plane(const Scene& scene, TracePath& path) {
  const Camera& cam = scene.camera;
  const Vec3& o = path.exit_origin;
  const Vec3& d = path.exit_direction;
  if (d.z() <= 1e-12) {
    path.status = ExitStatus::ParallelToPlane;
    return;
  }
  const double s = (scene.background_distance - o.z()) / d.z();
  if (s < 0.0) {
    path.status = ExitStatus::ParallelToPlane;
    return;
  }
  const Vec3 p = o + s * d;
  path.exit_u = cam.principal_x + cam.focal_length * p.x() / scene.background_distance;
  path.exit_v = cam.principal_y + cam.focal_length * p.y() / scene.background_distance;
}

}  // namespace

TracePath trace_path(const Scene& scene, double x, double y) {
  const Camera& cam = scene.camera;
  TracePath path;
  path.exit_origin = Vec3::Zero();
  path.exit_direction = cam.direction(x, y);

  if (scene.object) {
    const TransparentObject& obj = *scene.object;
    const Pose object_from_camera = obj.world_from_object.inverse() * cam.world_from_camera;
    const Pose camera_from_object = object_from_camera.inverse();
    Ray ray{object_from_camera * Vec3::Zero(), object_from_camera.linear() * path.exit_direction};
    double n_cur = medium_index(obj, ray.origin);
    double t_min = 0.0;
    bool escaped = false;
    for (int i = 0; i < kMaxInterfaces; ++i) {
      const auto hit = nearest_hit(obj, ray, t_min);
      if (!hit) {
        escaped = true;
        break;
      }
      const Vec3 p = ray.at(hit->t);
      const double n_next = medium_index(obj, p + kSurfaceEpsilon * ray.direction);
      if (n_next == n_cur) {
        ray.origin = p;
        t_min = kSurfaceEpsilon;
        continue;
      }
      Vec3 normal = hit->normal;
      if (normal.dot(ray.direction) > 0.0) normal = -normal;
      Interface iface;
      iface.point = camera_from_object * p;
      iface.normal = camera_from_object.linear() * normal;
      iface.incoming = camera_from_object.linear() * ray.direction;
      iface.n1 = n_cur;
      iface.n2 = n_next;
      const auto refracted = refract_direction(ray.direction, normal, n_cur, n_next);
      if (!refracted) {
        iface.transmittance = 0.0;
        iface.outgoing = iface.incoming;
        path.interfaces.push_back(iface);
        path.status = ExitStatus::TotalInternalReflection;
        path.transmittance = 0.0;
        path.exit_origin = iface.point;
        return path;
      }
      iface.transmittance = fresnel_transmittance(ray.direction, normal, n_cur, n_next);
      iface.outgoing = camera_from_object.linear() * *refracted;
      path.interfaces.push_back(iface);
      path.transmittance *= iface.transmittance;
      ray = Ray{p, *refracted};
      n_cur = n_next;
      t_min = kSurfaceEpsilon;
    }
    if (!path.interfaces.empty()) {
      path.exit_origin = path.interfaces.back().point;
      path.exit_direction = path.interfaces.back().outgoing;
      if (!escaped || n_cur != kAirIndex) {
        path.status = ExitStatus::TooManyInterfaces;
        return path;
      }
    }
  }

  path.status = path.interfaces.empty() ? ExitStatus::Missed : ExitStatus::Valid;
  land_on_plane(scene, path);
  return path;
}

TraceResult trace_ray(const Scene& scene, double x, double y) {
  const Camera& cam = scene.camera;
  if (!(x >= -0.5 && y >= -0.5 && x <= cam.width - 0.5 && y <= cam.height - 0.5)) {
    throw std::invalid_argument("trace_ray: pixel outside the image");
  }
  const TracePath path = trace_path(scene, x, y);
  TraceResult r;
  r.status = path.status;
  r.hit = !path.interfaces.empty();
  r.exit_valid = path.status == ExitStatus::Valid;
  r.transmittance = r.hit ? path.transmittance : 1.0;
  if (r.exit_valid) {
    r.exit_u = path.exit_u;
    r.exit_v = path.exit_v;
  } else if (path.status == ExitStatus::Missed) {
    r.exit_u = path.exit_u;
    r.exit_v = path.exit_v;
  }
  return r;
}

RenderPlan plan_render(const Scene& scene) {
  validate(scene);
  const int w = scene.camera.width;
  const int h = scene.camera.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;

  auto sample_at = [&](double px, double py, int x, int y) {
    const TraceResult t = trace_ray(scene, px, py);
    RenderPlan::Sample s;
    s.x = static_cast<float>(px);
    s.y = static_cast<float>(py);
    s.hit = t.hit;
    s.transmittance = t.transmittance;
    s.exit_valid = t.hit && t.exit_valid && std::abs(t.exit_u - x) <= w &&
                   std::abs(t.exit_v - y) <= h;
    if (s.exit_valid) {
      s.exit_u = t.exit_u;
      s.exit_v = t.exit_v;
    }
    return s;
  };

  std::vector<RenderPlan::Sample> centre(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) centre[static_cast<std::size_t>(y) * w + x] = sample_at(x, y, x, y);
  }
  auto hit_at = [&](int x, int y) { return centre[static_cast<std::size_t>(y) * w + x].hit; };

  RenderPlan plan;
  plan.width = w;
  plan.height = h;
  plan.offsets.reserve(n + 1);
  plan.samples.reserve(n);
  plan.offsets.push_back(0);
  constexpr double kSub[4][2] = {{-0.25, -0.25}, {0.25, -0.25}, {-0.25, 0.25}, {0.25, 0.25}};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool here = hit_at(x, y);
      const bool boundary = (x > 0 && hit_at(x - 1, y) != here) ||
                            (x + 1 < w && hit_at(x + 1, y) != here) ||
                            (y > 0 && hit_at(x, y - 1) != here) ||
                            (y + 1 < h && hit_at(x, y + 1) != here);
      if (boundary) {
        for (const auto& o : kSub) plan.samples.push_back(sample_at(x + o[0], y + o[1], x, y));
      } else {
        plan.samples.push_back(centre[static_cast<std::size_t>(y) * w + x]);
      }
      plan.offsets.push_back(static_cast<std::uint32_t>(plan.samples.size()));
    }
  }
  return plan;
}

Matte matte_from_plan(const RenderPlan& plan) {
  Matte matte(plan.width, plan.height);
  for (int y = 0; y < plan.height; ++y) {
    for (int x = 0; x < plan.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * plan.width + x;
      int hits = 0;
      int valid = 0;
      double transmittance = 0.0;
      double u = 0.0;
      double v = 0.0;
      for (std::uint32_t k = plan.offsets[i]; k < plan.offsets[i + 1]; ++k) {
        const auto& s = plan.samples[k];
        if (!s.hit) continue;
        ++hits;
        transmittance += s.transmittance;
        if (s.exit_valid) {
          ++valid;
          u += s.exit_u;
          v += s.exit_v;
        }
      }
      if (hits == 0) continue;
      const auto count = static_cast<float>(plan.offsets[i + 1] - plan.offsets[i]);
      matte.mask.at(x, y) = static_cast<float>(hits) / count;
      matte.attenuation.at(x, y) = std::clamp(static_cast<float>(transmittance / hits), 0.0f, 1.0f);
      if (valid == 0) {
        matte.flow.invalidate(x, y);
      } else {
        matte.flow.set(x, y, static_cast<float>(u / valid - x), static_cast<float>(v / valid - y));
      }
    }
  }
  return matte;
}

ImageBuffer image_from_plan(const RenderPlan& plan, const ImageBuffer& background) {
  if (!background.same_size(plan.width, plan.height)) {
    throw std::invalid_argument("render: background size must match the camera image");
  }
  const int c = background.channels();
  const simd::RasterView src{background.data().data(), background.width(), background.height(), c};
  ImageBuffer out(plan.width, plan.height, c);
  float sample[3];
  double acc[3];
  for (int y = 0; y < plan.height; ++y) {
    for (int x = 0; x < plan.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * plan.width + x;
      const std::uint32_t begin = plan.offsets[i];
      const std::uint32_t end = plan.offsets[i + 1];
      if (end - begin == 1) {
        const auto& s = plan.samples[begin];
        if (!s.hit) {
          for (int k = 0; k < c; ++k) out.at(x, y, k) = background.at(x, y, k);
          continue;
        }
        const auto gain = static_cast<float>(s.transmittance);
        if (s.exit_valid) {
          simd::detail::sample_bilinear(src, static_cast<float>(s.exit_u),
                                        static_cast<float>(s.exit_v), sample);
        } else {
          for (int k = 0; k < c; ++k) sample[k] = background.at(x, y, k);
        }
        for (int k = 0; k < c; ++k) out.at(x, y, k) = std::clamp(gain * sample[k], 0.0f, 1.0f);
        continue;
      }
      std::fill_n(acc, c, 0.0);
      for (std::uint32_t j = begin; j < end; ++j) {
        const auto& s = plan.samples[j];
        const double gain = s.hit ? s.transmittance : 1.0;
        if (s.hit && s.exit_valid) {
          simd::detail::sample_bilinear(src, static_cast<float>(s.exit_u),
                                        static_cast<float>(s.exit_v), sample);
        } else {
          simd::detail::sample_bilinear(src, s.x, s.y, sample);
        }
        for (int k = 0; k < c; ++k) acc[k] += gain * sample[k];
      }
      const double inv = 1.0 / (end - begin);
      for (int k = 0; k < c; ++k) {
        out.at(x, y, k) = std::clamp(static_cast<float>(acc[k] * inv), 0.0f, 1.0f);
      }
    }
  }
  return out;
}

ImageBuffer coverage_from_plan(const RenderPlan& plan) {
  ImageBuffer out(plan.width, plan.height, 1);
  for (int y = 0; y < plan.height; ++y) {
    for (int x = 0; x < plan.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * plan.width + x;
      int hits = 0;
      for (std::uint32_t k = plan.offsets[i]; k < plan.offsets[i + 1]; ++k) {
        hits += plan.samples[k].hit ? 1 : 0;
      }
      out.at(x, y) = static_cast<float>(hits) / static_cast<float>(plan.offsets[i + 1] - plan.offsets[i]);
    }
  }
  return out;
}

Matte render_ground_truth_matte(const Scene& scene) { return matte_from_plan(plan_render(scene)); }

ImageBuffer render_scene_image(const Scene& scene, const ImageBuffer& background) {
  if (!background.same_size(scene.camera.width, scene.camera.height)) {
    throw std::invalid_argument("render: background size must match the camera image");
  }
  return image_from_plan(plan_render(scene), background);
}

}  // namespace refmatte::render
