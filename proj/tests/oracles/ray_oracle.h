// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

// Ray queries by exhaustive scan, with a plane-then-edge-function test that
// shares no code with the renderer's intersection routine.

#pragma once

#include <cmath>
#include <optional>
#include <span>

#include "polyscene/mesh.h"

namespace oracle {

using polyscene::TriangleMesh;
using polyscene::geom::Vec3;

inline std::optional<double> ray_triangle(const Vec3& o, const Vec3& d,
                                          const Vec3& a, const Vec3& b,
                                          const Vec3& c) {
  const Vec3 n = cross(b - a, c - a);
  const double denom = dot(n, d);
  if (std::abs(denom) < 1e-14) return std::nullopt;
  const double t = dot(n, a - o) / denom;
  if (t <= 0.0) return std::nullopt;
  const Vec3 p = o + t * d;
  // Inside iff p is on the same side of all three edges as the normal.
  const double e0 = dot(n, cross(b - a, p - a));
  const double e1 = dot(n, cross(c - b, p - b));
  const double e2 = dot(n, cross(a - c, p - c));
  if (e0 < 0.0 || e1 < 0.0 || e2 < 0.0) return std::nullopt;
  return t;
}

inline bool scan_hits(std::span<const TriangleMesh> meshes, const Vec3& o,
                      const Vec3& d) {
  for (const auto& m : meshes) {
    for (const auto& t : m.triangles) {
      if (ray_triangle(o, d, m.vertices[t[0]], m.vertices[t[1]],
                       m.vertices[t[2]])) {
        return true;
      }
    }
  }
  return false;
}

/// Slab test for an axis-aligned box.
inline bool ray_hits_box(const Vec3& o, const Vec3& d, const Vec3& lo,
                         const Vec3& hi) {
  double t0 = 0.0;
  double t1 = INFINITY;
  const double os[3] = {o.x, o.y, o.z};
  const double ds[3] = {d.x, d.y, d.z};
  const double los[3] = {lo.x, lo.y, lo.z};
  const double his[3] = {hi.x, hi.y, hi.z};
  for (int k = 0; k < 3; ++k) {
    if (ds[k] == 0.0) {
      if (os[k] < los[k] || os[k] > his[k]) return false;
      continue;
    }
    double a = (los[k] - os[k]) / ds[k];
    double b = (his[k] - os[k]) / ds[k];
    if (a > b) std::swap(a, b);
    t0 = std::max(t0, a);
    t1 = std::min(t1, b);
  }
  return t0 <= t1;
}

}  // namespace oracle
