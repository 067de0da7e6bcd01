// Copyright 2026 The refmatte Authors
// SPDX-License-Identifier: Apache-2.0
#include "refmatte/render/shapes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace refmatte::render {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kParallel = 1e-15;

struct Span {
  double t0 = kInf;
  double t1 = -kInf;
  Vec3 n0;
  Vec3 n1;
  bool empty() const { return !(t0 <= t1); }
};

std::optional<ShapeHit> first_after(const Span& s, double t_min) {
  if (s.empty()) return std::nullopt;
  if (s.t0 > t_min) return ShapeHit{s.t0, s.n0};
  if (s.t1 > t_min) return ShapeHit{s.t1, s.n1};
  return std::nullopt;
}

// Ray/ball chord, or an empty span.
Span ball_span(const Vec3& center, double radius, const Ray& ray) {
  const Vec3 oc = ray.origin - center;
  const double b = oc.dot(ray.direction);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return {};
  const double root = std::sqrt(disc);
  // Numerically stable pair of roots.
  const double q = b > 0.0 ? -(b + root) : -(b - root);
  double ta = q;
  double tb = q != 0.0 ? c / q : -b;
  if (ta > tb) std::swap(ta, tb);
  Span s;
  s.t0 = ta;
  s.t1 = tb;
  s.n0 = (ray.at(ta) - center) / radius;
  s.n1 = (ray.at(tb) - center) / radius;
  return s;
}

void tangent_basis(const Vec3& n, Vec3& u, Vec3& v) {
  const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  u = n.cross(helper).normalized();
  v = n.cross(u);
}

// ---- slab ----------------------------------------------------------------

Span slab_span(const Slab& slab, const Ray& ray) {
  const Vec3 n = slab.normal.normalized();
  Vec3 u;
  Vec3 v;
  tangent_basis(n, u, v);
  const Vec3 axes[3] = {n, u, v};
  const double half[3] = {0.5 * slab.thickness, slab.half_extent, slab.half_extent};
  Span s;
  s.t0 = -kInf;
  s.t1 = kInf;
  for (int a = 0; a < 3; ++a) {
    const double o = ray.origin.dot(axes[a]);
    const double d = ray.direction.dot(axes[a]);
    if (std::abs(d) < kParallel) {
      if (std::abs(o) > half[a]) return {};
      continue;
    }
    double ta = (-half[a] - o) / d;
    double tb = (half[a] - o) / d;
    Vec3 na = -axes[a];
    Vec3 nb = axes[a];
    if (ta > tb) {
      std::swap(ta, tb);
      std::swap(na, nb);
    }
    if (ta > s.t0) {
      s.t0 = ta;
      s.n0 = na;
    }
    if (tb < s.t1) {
      s.t1 = tb;
      s.n1 = nb;
    }
    if (s.empty()) return {};
  }
  return s;
}

bool slab_contains(const Slab& slab, const Vec3& p) {
  const Vec3 n = slab.normal.normalized();
  Vec3 u;
  Vec3 v;
  tangent_basis(n, u, v);
  return std::abs(p.dot(n)) < 0.5 * slab.thickness && std::abs(p.dot(u)) < slab.half_extent &&
         std::abs(p.dot(v)) < slab.half_extent;
}

// ---- lens ----------------------------------------------------------------

Vec3 front_center(const Lens& lens) { return {0.0, 0.0, -0.5 * lens.thickness + lens.radius_front}; }
Vec3 back_center(const Lens& lens) { return {0.0, 0.0, 0.5 * lens.thickness - lens.radius_back}; }

Span lens_span(const Lens& lens, const Ray& ray) {
  const Span a = ball_span(front_center(lens), lens.radius_front, ray);
  if (a.empty()) return {};
  const Span b = ball_span(back_center(lens), lens.radius_back, ray);
  if (b.empty()) return {};
  Span s;
  if (a.t0 >= b.t0) {
    s.t0 = a.t0;
    s.n0 = a.n0;
  } else {
    s.t0 = b.t0;
    s.n0 = b.n0;
  }
  if (a.t1 <= b.t1) {
    s.t1 = a.t1;
    s.n1 = a.n1;
  } else {
    s.t1 = b.t1;
    s.n1 = b.n1;
  }
  return s.empty() ? Span{} : s;
}

// ---- surface of revolution -------------------------------------------------

struct Segment {
  ProfilePoint a;
  ProfilePoint b;
};

std::vector<Segment> closed_segments(const SurfaceOfRevolution& sor) {
  std::vector<Segment> segs;
  const auto& p = sor.profile;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const ProfilePoint& a = p[i];
    const ProfilePoint& b = p[(i + 1) % p.size()];
    if (a.r == b.r && a.z == b.z) continue;
    // The closing segment along the axis is not a surface.
    if (a.r == 0.0 && b.r == 0.0) continue;
    segs.push_back({a, b});
  }
  return segs;
}

double sor_bound_distance(const SurfaceOfRevolution& sor, const Ray& ray) {
  const BoundingSphere bs = bounds(Shape{sor});
  return (ray.origin - bs.center).norm() + 2.0 * bs.radius;
}

// Smallest root of g(t) = x(t)^2 + y(t)^2 - r(z(t))^2 in (lo, hi), found by
// bisection on each monotone piece of the quadratic.
std::optional<double> cone_root(const Segment& s, const Ray& ray, double lo, double hi) {
  const double k = (s.b.r - s.a.r) / (s.b.z - s.a.z);
  const Vec3& o = ray.origin;
  const Vec3& d = ray.direction;
  auto g = [&](double t) {
    const Vec3 p = o + t * d;
    const double r = s.a.r + k * (p.z() - s.a.z);
    return p.x() * p.x() + p.y() * p.y() - r * r;
  };
  const double a0 = s.a.r + k * (o.z() - s.a.z);
  const double a1 = k * d.z();
  const double qa = d.x() * d.x() + d.y() * d.y() - a1 * a1;
  const double qb = 2.0 * (o.x() * d.x() + o.y() * d.y() - a0 * a1);
  double cuts[3] = {lo, hi, hi};
  int ncuts = 2;
  if (std::abs(qa) > 1e-300) {
    const double tc = -qb / (2.0 * qa);
    if (tc > lo && tc < hi) {
      cuts[1] = tc;
      cuts[2] = hi;
      ncuts = 3;
    }
  }
  for (int i = 0; i + 1 < ncuts; ++i) {
    double l = cuts[i];
    double h = cuts[i + 1];
    double gl = g(l);
    const double gh = g(h);
    if (gl == 0.0) return l;
    if ((gl < 0.0) == (gh < 0.0)) {
      if (gh == 0.0) return h;
      continue;
    }
    while (h - l > kSorTolerance) {
      const double m = 0.5 * (l + h);
      const double gm = g(m);
      if ((gm < 0.0) == (gl < 0.0)) {
        l = m;
        gl = gm;
      } else {
        h = m;
      }
    }
    return 0.5 * (l + h);
  }
  return std::nullopt;
}

std::optional<ShapeHit> sor_intersect(const SurfaceOfRevolution& sor, const Ray& ray,
                                      double t_min) {
  const BoundingSphere bs = bounds(Shape{sor});
  if (ball_span(bs.center, bs.radius, ray).empty()) return std::nullopt;
  const double t_far = sor_bound_distance(sor, ray);
  std::optional<ShapeHit> best;
  const Vec3& o = ray.origin;
  const Vec3& d = ray.direction;
  for (const Segment& s : closed_segments(sor)) {
    const double best_t = best ? best->t : kInf;
    if (s.a.z == s.b.z) {
      // Annulus (or disc) at constant z.
      if (std::abs(d.z()) < kParallel) continue;
      const double t = (s.a.z - o.z()) / d.z();
      if (!(t > t_min) || t >= best_t) continue;
      const Vec3 p = ray.at(t);
      const double rho = std::hypot(p.x(), p.y());
      if (rho < std::min(s.a.r, s.b.r) || rho > std::max(s.a.r, s.b.r)) continue;
      best = ShapeHit{t, Vec3::UnitZ()};
      continue;
    }
    const double zlo = std::min(s.a.z, s.b.z);
    const double zhi = std::max(s.a.z, s.b.z);
    double lo;
    double hi;
    if (std::abs(d.z()) < kParallel) {
      if (o.z() < zlo || o.z() > zhi) continue;
      lo = t_min;
      hi = t_far;
    } else {
      lo = (zlo - o.z()) / d.z();
      hi = (zhi - o.z()) / d.z();
      if (lo > hi) std::swap(lo, hi);
      lo = std::max(lo, t_min);
      hi = std::min(hi, best_t);
    }
    if (!(lo < hi)) continue;
    const auto t = cone_root(s, ray, lo, hi);
    if (!t || *t <= t_min || *t >= best_t) continue;
    const Vec3 p = ray.at(*t);
    const double k = (s.b.r - s.a.r) / (s.b.z - s.a.z);
    const double r = s.a.r + k * (p.z() - s.a.z);
    Vec3 n(p.x(), p.y(), -r * k);
    if (n.squaredNorm() < 1e-300) n = Vec3::UnitZ();
    best = ShapeHit{*t, n.normalized()};
  }
  return best;
}

bool sor_contains(const SurfaceOfRevolution& sor, const Vec3& p) {
  const double rho = std::hypot(p.x(), p.y());
  const double z = p.z();
  bool inside = false;
  const auto& pts = sor.profile;
  const std::size_t n = pts.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const ProfilePoint& a = pts[i];
    const ProfilePoint& b = pts[j];
    if ((a.z > z) != (b.z > z)) {
      const double r_cross = a.r + (z - a.z) * (b.r - a.r) / (b.z - a.z);
      if (rho < r_cross) inside = !inside;
    }
  }
  return inside;
}

double cross2(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

bool segments_cross(const ProfilePoint& p1, const ProfilePoint& p2, const ProfilePoint& q1,
                    const ProfilePoint& q2) {
  const double d1 = cross2(q2.r - q1.r, q2.z - q1.z, p1.r - q1.r, p1.z - q1.z);
  const double d2 = cross2(q2.r - q1.r, q2.z - q1.z, p2.r - q1.r, p2.z - q1.z);
  const double d3 = cross2(p2.r - p1.r, p2.z - p1.z, q1.r - p1.r, q1.z - p1.z);
  const double d4 = cross2(p2.r - p1.r, p2.z - p1.z, q2.r - p1.r, q2.z - p1.z);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

void validate_sor(const SurfaceOfRevolution& sor) {
  const auto& p = sor.profile;
  if (p.size() < 3) throw std::invalid_argument("sor: profile needs at least 3 points");
  double area = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i].r) || !std::isfinite(p[i].z) || p[i].r < 0.0) {
      throw std::invalid_argument("sor: profile radii must be finite and non-negative");
    }
    const ProfilePoint& q = p[(i + 1) % p.size()];
    area += cross2(p[i].r, p[i].z, q.r, q.z);
  }
  if (std::abs(area) < 1e-12) throw std::invalid_argument("sor: profile encloses no area");
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;  // adjacent through the closing segment
      if (segments_cross(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) {
        throw std::invalid_argument("sor: profile is self-intersecting");
      }
    }
  }
}

}  // namespace

std::optional<ShapeHit> intersect(const Shape& shape, const Ray& ray, double t_min) {
  return std::visit(
      [&](const auto& s) -> std::optional<ShapeHit> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Slab>) {
          return first_after(slab_span(s, ray), t_min);
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return first_after(ball_span(s.center, s.radius, ray), t_min);
        } else if constexpr (std::is_same_v<T, Lens>) {
          return first_after(lens_span(s, ray), t_min);
        } else {
          return sor_intersect(s, ray, t_min);
        }
      },
      shape);
}

bool contains(const Shape& shape, const Vec3& p) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Slab>) {
          return slab_contains(s, p);
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return (p - s.center).squaredNorm() < s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, Lens>) {
          return (p - front_center(s)).squaredNorm() < s.radius_front * s.radius_front &&
                 (p - back_center(s)).squaredNorm() < s.radius_back * s.radius_back;
        } else {
          return sor_contains(s, p);
        }
      },
      shape);
}

BoundingSphere bounds(const Shape& shape) {
  return std::visit(
      [&](const auto& s) -> BoundingSphere {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Slab>) {
          const double h = 0.5 * s.thickness;
          return {Vec3::Zero(), std::sqrt(2.0 * s.half_extent * s.half_extent + h * h)};
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return {s.center, s.radius};
        } else if constexpr (std::is_same_v<T, Lens>) {
          const double a = std::min(s.radius_front, s.radius_back);
          const double h = 0.5 * s.thickness;
          return {Vec3::Zero(), std::sqrt(a * a + h * h)};
        } else {
          double rmax = 0.0;
          double zmin = kInf;
          double zmax = -kInf;
          for (const auto& p : s.profile) {
            rmax = std::max(rmax, p.r);
            zmin = std::min(zmin, p.z);
            zmax = std::max(zmax, p.z);
          }
          const double hz = 0.5 * (zmax - zmin);
          return {Vec3(0.0, 0.0, 0.5 * (zmin + zmax)), std::sqrt(rmax * rmax + hz * hz)};
        }
      },
      shape);
}

void validate(const Shape& shape) {
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Slab>) {
          if (!(s.thickness > 0.0) || !(s.half_extent > 0.0)) {
            throw std::invalid_argument("slab: thickness and extent must be positive");
          }
          if (!(s.normal.norm() > 1e-12)) throw std::invalid_argument("slab: zero normal");
        } else if constexpr (std::is_same_v<T, Sphere>) {
          if (!(s.radius > 0.0)) throw std::invalid_argument("sphere: radius must be positive");
        } else if constexpr (std::is_same_v<T, Lens>) {
          if (!(s.thickness > 0.0) || !(s.radius_front > 0.0) || !(s.radius_back > 0.0)) {
            throw std::invalid_argument("lens: parameters must be positive");
          }
          if (2.0 * s.radius_front <= s.thickness || 2.0 * s.radius_back <= s.thickness) {
            throw std::invalid_argument("lens: thickness must be below both cap diameters");
          }
        } else {
          validate_sor(s);
        }
      },
      shape);
}

const char* shape_name(const Shape& shape) {
  return std::visit(
      [](const auto& s) -> const char* {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Slab>) {
          return "slab";
        } else if constexpr (std::is_same_v<T, Sphere>) {
          return "sphere";
        } else if constexpr (std::is_same_v<T, Lens>) {
          return "lens";
        } else {
          return "sor";
        }
      },
      shape);
}

}  // namespace refmatte::render
