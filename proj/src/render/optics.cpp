// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include "refmatte/render/optics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace refmatte::render {
namespace {

constexpr double kUnitTolerance = 1e-6;

struct Interface {
  double cos_i;  // >= 0
  double eta;    // n1 / n2
  Vec3 normal;   // faces the incident ray
};

Interface prepare(const Vec3& incident, const Vec3& normal, double n1, double n2) {
  if (std::abs(incident.norm() - 1.0) > kUnitTolerance ||
      std::abs(normal.norm() - 1.0) > kUnitTolerance) {
    throw std::invalid_argument("refraction: incident and normal must be unit vectors");
  }
  if (!(n1 > 0.0) || !(n2 > 0.0)) {
    throw std::invalid_argument("refraction: refractive indices must be positive");
  }
  double cos_i = -incident.dot(normal);
  Vec3 n = normal;
  if (cos_i < 0.0) {
    cos_i = -cos_i;
    n = -normal;
  }
  return {std::min(cos_i, 1.0), n1 / n2, n};
}

}  // namespace

std::optional<Vec3> refract_direction(const Vec3& incident, const Vec3& normal, double n1,
                                      double n2) {
  const Interface s = prepare(incident, normal, n1, n2);
  const double sin2_t = s.eta * s.eta * (1.0 - s.cos_i * s.cos_i);
  if (sin2_t > 1.0) return std::nullopt;
  const double cos_t = std::sqrt(1.0 - sin2_t);
  Vec3 t = s.eta * incident + (s.eta * s.cos_i - cos_t) * s.normal;
  return t.normalized();
}

double fresnel_transmittance(const Vec3& incident, const Vec3& normal, double n1, double n2) {
  const Interface s = prepare(incident, normal, n1, n2);
  const double sin2_t = s.eta * s.eta * (1.0 - s.cos_i * s.cos_i);
  if (sin2_t > 1.0) return 0.0;
  const double cos_t = std::sqrt(1.0 - sin2_t);
  const double rs_num = n1 * s.cos_i - n2 * cos_t;
  const double rs_den = n1 * s.cos_i + n2 * cos_t;
  const double rp_num = n1 * cos_t - n2 * s.cos_i;
  const double rp_den = n1 * cos_t + n2 * s.cos_i;
  // Both denominators vanish only at exact grazing incidence, where nothing is transmitted.
  if (rs_den <= 0.0 || rp_den <= 0.0) return 0.0;
  const double rs = (rs_num / rs_den) * (rs_num / rs_den);
  const double rp = (rp_num / rp_den) * (rp_num / rp_den);
  return std::clamp(1.0 - 0.5 * (rs + rp), 0.0, 1.0);
}

}  // namespace refmatte::render
