// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <numbers>

#include "polyscene/errors.h"
#include "polyscene/geom.h"
#include "polyscene/rng.h"

namespace polyscene::geom {

inline constexpr int kMaxRejectionAttempts = 1'000'000;

/// Direction with elevation arccos(u) and azimuth phi:
/// (sin t cos phi, sin t sin phi, cos t), t = acos(u).
inline UnitVec3 direction_from_elevation(double u, double phi) {
  const double theta = std::acos(u);
  const double s = std::sin(theta);
  return UnitVec3::from_unit({s * std::cos(phi), s * std::sin(phi), std::cos(theta)});
}

/// Marsaglia's map from a point of the open unit disk to the unit sphere.
/// Requires x1^2 + x2^2 < 1.
inline UnitVec3 marsaglia_from_disk(double x1, double x2) {
  const double s = x1 * x1 + x2 * x2;
  const double r = 2.0 * std::sqrt(1.0 - s);
  return UnitVec3::from_unit({x1 * r, x2 * r, 1.0 - 2.0 * s});
}

/// Uniform point in the closed unit ball by rejection from [-1, 1]^3.
/// Consumes three uniforms per attempt.
template <UniformSource R>
Vec3 sample_point_in_ball(R& rng) {
  for (int attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
    const double x = rng.uniform(-1.0, 1.0);
    const double y = rng.uniform(-1.0, 1.0);
    const double z = rng.uniform(-1.0, 1.0);
    const Vec3 p{x, y, z};
    if (squared_norm(p) <= 1.0) return p;
  }
  throw SamplingExhausted("sample_point_in_ball: rejection cap reached");
}

/// Uniform direction: phi ~ U[0, 2pi), then u ~ U[-1, 1), elevation acos(u).
template <UniformSource R>
UnitVec3 sample_unit_direction(R& rng) {
  const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
  const double u = rng.uniform(-1.0, 1.0);
  return direction_from_elevation(u, phi);
}

/// Uniform point on the unit sphere (Marsaglia 1972).
template <UniformSource R>
UnitVec3 marsaglia_sphere_point(R& rng) {
  for (int attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
    const double x1 = rng.uniform(-1.0, 1.0);
    const double x2 = rng.uniform(-1.0, 1.0);
    if (x1 * x1 + x2 * x2 < 1.0) return marsaglia_from_disk(x1, x2);
  }
  throw SamplingExhausted("marsaglia_sphere_point: rejection cap reached");
}

/// Random plane: anchor uniform in the unit ball, normal uniform on the
/// sphere.
template <UniformSource R>
Plane sample_plane(R& rng) {
  const Vec3 point = sample_point_in_ball(rng);
  return Plane{point, sample_unit_direction(rng)};
}

}  // namespace polyscene::geom
