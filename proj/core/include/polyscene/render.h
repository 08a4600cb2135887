// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "polyscene/geom.h"
#include "polyscene/mesh.h"
#include "polyscene/rng.h"
#include "polyscene/scenegen.h"

namespace polyscene::render {

using geom::Quaternion;
using geom::UnitVec3;
using geom::Vec3;
using scenegen::Lighting;

/// Perspective pinhole camera; the sensor width spans the image width.
struct CameraIntrinsics {
  double focal_length_mm = 35.0;
  double sensor_width_mm = 32.0;
  int width = 1920;
  int height = 1080;

  double focal_length_px() const {
    return focal_length_mm / sensor_width_mm * width;
  }
  /// 2 atan(sensor_width / (2 focal_length)), radians.
  double horizontal_fov() const;
  void validate() const;
};

struct CameraPose {
  Vec3 position;
  Quaternion orientation;

  friend bool operator==(const CameraPose&, const CameraPose&) = default;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr Rgb kBackground{128, 128, 128};
inline constexpr Rgb kMaterialColor{0xBE, 0xB3, 0xFF};
inline constexpr Rgb kLampColor{0xFF, 0xFF, 0xFF};
inline constexpr Vec3 kFixedLampPosition{-4.6, 1.763, -4.493};
/// Fraction of the material color every visible surface receives.
inline constexpr double kAmbient = 0.15;
inline constexpr double kCameraRadius = 5.0;
/// Imported scenes must fit in [-kSceneBound, kSceneBound]^3.
inline constexpr double kSceneBound = 3.0;

struct LightingConfig {
  Lighting mode = Lighting::kFixedSpotlight;
  Vec3 lamp_position = kFixedLampPosition;
  Rgb lamp_color = kLampColor;
  Rgb material_color = kMaterialColor;

  static LightingConfig for_mode(Lighting mode) {
    LightingConfig c;
    c.mode = mode;
    return c;
  }
};

/// Row-major RGB8.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, Rgb fill = kBackground);

  Rgb at(int x, int y) const {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    pixels[i] = c.r;
    pixels[i + 1] = c.g;
    pixels[i + 2] = c.b;
  }

  friend bool operator==(const Image&, const Image&) = default;
};

struct Ray {
  Vec3 origin;
  UnitVec3 direction;
};

/// Camera on a sphere of `radius` around the origin, aimed at the origin.
/// The position comes from Marsaglia sampling; the orientation from look_at
/// with up = +y, or up = +z when the camera sits on the y axis.
/// Throws InvalidArgument unless radius > kSceneBound.
CameraPose sample_camera_pose(RngStream& rng, double radius = kCameraRadius);

/// Pose at `position` looking at the origin (same up rule as above).
CameraPose pose_looking_at_origin(const Vec3& position);

/// Ray through the center of pixel (px, py); py grows downwards.
Ray primary_ray(const CameraPose& pose, const CameraIntrinsics& intr, int px,
                int py);

/// Möller-Trumbore; two-sided. Returns the ray parameter of the hit.
std::optional<double> intersect_triangle(const Ray& ray, const Vec3& a,
                                         const Vec3& b, const Vec3& c);

struct RenderOptions {
  /// 2x2 supersampling per pixel.
  bool supersample = false;
  /// Rendering stops with RenderTimeout once this passes.
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// Worker threads; 0 picks std::thread::hardware_concurrency().
  int threads = 0;
};

/// Bounding volume hierarchy over a flat triangle soup.
class TriangleSet {
 public:
  explicit TriangleSet(std::span<const TriangleMesh> meshes);

  struct Hit {
    double t = 0.0;
    int triangle = -1;
  };

  std::optional<Hit> closest_hit(const Ray& ray) const;
  /// True if anything is hit with t in (t_min, t_max).
  bool occluded(const Ray& ray, double t_min, double t_max) const;

  std::size_t size() const { return triangles_.size(); }
  const Vec3& normal(int triangle) const { return normals_[triangle]; }

 private:
  struct Node {
    Aabb box;
    int first = 0;  // leaf: first triangle; inner: left child index
    int count = 0;  // leaf: triangle count; inner: 0
    int right = 0;
  };
  int build(int first, int count);

  std::vector<std::array<Vec3, 3>> triangles_;
  std::vector<Vec3> normals_;
  std::vector<Node> nodes_;
};

Image render(std::span<const TriangleMesh> meshes, const CameraPose& pose,
             const LightingConfig& lighting, const CameraIntrinsics& intr,
             const RenderOptions& options = {});

Image render(const scenegen::Scene& scene, const CameraPose& pose,
             const LightingConfig& lighting, const CameraIntrinsics& intr,
             const RenderOptions& options = {});

/// Per-channel population variance over all pixels, averaged over channels.
double image_variance(const Image& image);

}  // namespace polyscene::render
