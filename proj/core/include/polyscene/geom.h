// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <ostream>

namespace polyscene::geom {

/// Module-wide tolerance for geometric predicates.
inline constexpr double kDefaultTolerance = 1e-9;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(const Vec3& a, double s) {
  return {a.x / s, a.y / s, a.z / s};
}

constexpr double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double squared_norm(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::hypot(a.x, a.y, a.z); }

std::ostream& operator<<(std::ostream& os, const Vec3& v);

/// A direction with unit length (|norm - 1| <= 1e-9).
class UnitVec3 {
 public:
  /// Normalizes `v`; throws InvalidArgument for a (near) zero vector.
  explicit UnitVec3(const Vec3& v);

  /// Wraps a vector that is already unit length without renormalizing it,
  /// so exact values produced by closed-form formulas are kept bit-for-bit.
  /// Throws InvalidArgument if |norm - 1| > 1e-9.
  static UnitVec3 from_unit(const Vec3& v);

  static std::optional<UnitVec3> try_normalize(const Vec3& v,
                                               double tol = kDefaultTolerance);

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x; }
  double y() const { return v_.y; }
  double z() const { return v_.z; }

  UnitVec3 operator-() const { return from_unit(-v_); }
  operator const Vec3&() const { return v_; }

  friend bool operator==(const UnitVec3&, const UnitVec3&) = default;

 private:
  struct Trusted {};
  UnitVec3(const Vec3& v, Trusted) : v_(v) {}
  Vec3 v_;
};

/// Point-and-normal plane. The positive side is where
/// dot(normal, p - point) > 0.
struct Plane {
  Vec3 point;
  UnitVec3 normal;

  double offset() const { return dot(normal.vec(), point); }
  double signed_distance(const Vec3& p) const {
    return dot(normal.vec(), p) - offset();
  }
};

struct Line {
  Vec3 point;
  UnitVec3 direction;
};

/// Intersection line of two planes, or nullopt when |n_a x n_b| <= tol.
std::optional<Line> plane_plane_line(const Plane& a, const Plane& b,
                                     double tol = kDefaultTolerance);

/// Common point of three planes, or nullopt when |det| <= tol.
std::optional<Vec3> three_plane_point(const Plane& a, const Plane& b,
                                      const Plane& c,
                                      double tol = kDefaultTolerance);

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Scalar-first rotation quaternion (w, x, y, z), right-handed.
struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static constexpr Quaternion identity() { return {}; }
  static Quaternion from_axis_angle(const Vec3& axis, double angle);
  static Quaternion from_matrix(const Mat3& m);

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  Quaternion normalized() const;
  Quaternion conjugate() const { return {w, -x, -y, -z}; }

  /// Rotation matrix. Uses 2/|q|^2 scaling so a slightly non-unit quaternion
  /// still yields a proper rotation.
  Mat3 to_matrix() const;
  Vec3 rotate(const Vec3& v) const;

  friend bool operator==(const Quaternion&, const Quaternion&) = default;
};

Quaternion operator*(const Quaternion& a, const Quaternion& b);
std::ostream& operator<<(std::ostream& os, const Quaternion& q);

/// Camera default frame: looks along -z with +y up.
inline constexpr Vec3 kCameraForward{0.0, 0.0, -1.0};
inline constexpr Vec3 kCameraUp{0.0, 1.0, 0.0};

/// Orientation that turns the default camera frame to view `target` from
/// `position`. The result is canonicalized to w > 0 (or, when w == 0, to a
/// positive first non-zero component).
///
/// Throws InvalidArgument when position == target and DegenerateLookAt when
/// the viewing direction is parallel to `up`.
Quaternion look_at(const Vec3& position, const Vec3& target,
                   const UnitVec3& up);

}  // namespace polyscene::geom
