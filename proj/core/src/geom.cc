// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/geom.h"

#include <cmath>

#include "polyscene/errors.h"

namespace polyscene::geom {

std::ostream& operator<<(std::ostream& os, const Vec3& v) {
  return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

std::ostream& operator<<(std::ostream& os, const Quaternion& q) {
  return os << "(" << q.w << ", " << q.x << ", " << q.y << ", " << q.z << ")";
}

UnitVec3::UnitVec3(const Vec3& v) {
  const double n = norm(v);
  if (!(n > kDefaultTolerance) || !std::isfinite(n)) {
    throw InvalidArgument("cannot normalize a zero-length vector");
  }
  v_ = v / n;
}

UnitVec3 UnitVec3::from_unit(const Vec3& v) {
  if (!(std::abs(norm(v) - 1.0) <= 1e-9)) {
    throw InvalidArgument("vector is not unit length");
  }
  return UnitVec3(v, Trusted{});
}

std::optional<UnitVec3> UnitVec3::try_normalize(const Vec3& v, double tol) {
  const double n = norm(v);
  if (!(n > tol) || !std::isfinite(n)) return std::nullopt;
  return UnitVec3(v / n, Trusted{});
}

std::optional<Line> plane_plane_line(const Plane& a, const Plane& b,
                                     double tol) {
  const Vec3& na = a.normal.vec();
  const Vec3& nb = b.normal.vec();
  const Vec3 d = cross(na, nb);
  const double d2 = squared_norm(d);
  if (!(std::sqrt(d2) > tol)) return std::nullopt;
  // Point closest to the origin on both planes.
  const Vec3 p = (a.offset() * cross(nb, d) + b.offset() * cross(d, na)) / d2;
  return Line{p, UnitVec3(d)};
}

std::optional<Vec3> three_plane_point(const Plane& a, const Plane& b,
                                      const Plane& c, double tol) {
  const Vec3& n1 = a.normal.vec();
  const Vec3& n2 = b.normal.vec();
  const Vec3& n3 = c.normal.vec();
  const Vec3 c23 = cross(n2, n3);
  const double det = dot(n1, c23);
  if (!(std::abs(det) > tol)) return std::nullopt;
  return (a.offset() * c23 + b.offset() * cross(n3, n1) +
          c.offset() * cross(n1, n2)) /
         det;
}

Quaternion Quaternion::from_axis_angle(const Vec3& axis, double angle) {
  const UnitVec3 u(axis);
  const double s = std::sin(angle / 2.0);
  return {std::cos(angle / 2.0), u.x() * s, u.y() * s, u.z() * s};
}

Quaternion Quaternion::from_matrix(const Mat3& m) {
  Quaternion q;
  const double trace = m[0][0] + m[1][1] + m[2][2];
  if (trace > 0.0) {
    const double s = std::sqrt(trace + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.x = (m[2][1] - m[1][2]) / s;
    q.y = (m[0][2] - m[2][0]) / s;
    q.z = (m[1][0] - m[0][1]) / s;
  } else if (m[0][0] > m[1][1] && m[0][0] > m[2][2]) {
    const double s = std::sqrt(1.0 + m[0][0] - m[1][1] - m[2][2]) * 2.0;
    q.w = (m[2][1] - m[1][2]) / s;
    q.x = 0.25 * s;
    q.y = (m[0][1] + m[1][0]) / s;
    q.z = (m[0][2] + m[2][0]) / s;
  } else if (m[1][1] > m[2][2]) {
    const double s = std::sqrt(1.0 + m[1][1] - m[0][0] - m[2][2]) * 2.0;
    q.w = (m[0][2] - m[2][0]) / s;
    q.x = (m[0][1] + m[1][0]) / s;
    q.y = 0.25 * s;
    q.z = (m[1][2] + m[2][1]) / s;
  } else {
    const double s = std::sqrt(1.0 + m[2][2] - m[0][0] - m[1][1]) * 2.0;
    q.w = (m[1][0] - m[0][1]) / s;
    q.x = (m[0][2] + m[2][0]) / s;
    q.y = (m[1][2] + m[2][1]) / s;
    q.z = 0.25 * s;
  }
  return q;
}

Quaternion Quaternion::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) throw InvalidArgument("degenerate quaternion");
  return {w / n, x / n, y / n, z / n};
}

Mat3 Quaternion::to_matrix() const {
  const double n2 = w * w + x * x + y * y + z * z;
  const double s = 2.0 / n2;
  return {{{1.0 - s * (y * y + z * z), s * (x * y - w * z), s * (x * z + w * y)},
           {s * (x * y + w * z), 1.0 - s * (x * x + z * z), s * (y * z - w * x)},
           {s * (x * z - w * y), s * (y * z + w * x),
            1.0 - s * (x * x + y * y)}}};
}

Vec3 Quaternion::rotate(const Vec3& v) const {
  const Mat3 m = to_matrix();
  return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
          m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
          m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

Quaternion operator*(const Quaternion& a, const Quaternion& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

namespace {

Quaternion canonical(Quaternion q) {
  const double first = q.w != 0.0   ? q.w
                       : q.x != 0.0 ? q.x
                       : q.y != 0.0 ? q.y
                                    : q.z;
  if (first < 0.0) q = {-q.w, -q.x, -q.y, -q.z};
  // Avoid emitting negative zeros.
  q.w += 0.0;
  q.x += 0.0;
  q.y += 0.0;
  q.z += 0.0;
  return q;
}

}  // namespace

Quaternion look_at(const Vec3& position, const Vec3& target,
                   const UnitVec3& up) {
  const auto forward = UnitVec3::try_normalize(target - position, 0.0);
  if (!forward) throw InvalidArgument("look_at: position equals target");
  const auto right =
      UnitVec3::try_normalize(cross(forward->vec(), up.vec()));
  if (!right) {
    throw DegenerateLookAt("look_at: viewing direction is parallel to up");
  }
  const Vec3 true_up = cross(right->vec(), forward->vec());
  // Columns are the camera's +x, +y and +z axes in world coordinates.
  const Vec3& r = right->vec();
  const Vec3& f = forward->vec();
  const Mat3 m{{{r.x, true_up.x, -f.x},
                {r.y, true_up.y, -f.y},
                {r.z, true_up.z, -f.z}}};
  return canonical(Quaternion::from_matrix(m));
}

}  // namespace polyscene::geom
