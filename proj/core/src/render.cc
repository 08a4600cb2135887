// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/render.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "polyscene/errors.h"
#include "polyscene/sampling.h"

namespace polyscene::render {

void CameraIntrinsics::validate() const {
  if (!(focal_length_mm > 0.0) || !std::isfinite(focal_length_mm)) {
    throw InvalidArgument("focal_length_mm must be positive");
  }
  if (!(sensor_width_mm > 0.0) || !std::isfinite(sensor_width_mm)) {
    throw InvalidArgument("sensor_width_mm must be positive");
  }
  if (width < 1 || height < 1 || width > 16384 || height > 16384) {
    throw InvalidArgument("image size must be within 1..16384");
  }
}

double CameraIntrinsics::horizontal_fov() const {
  return 2.0 * std::atan(sensor_width_mm / (2.0 * focal_length_mm));
}

Image::Image(int w, int h, Rgb fill) : width(w), height(h) {
  pixels.resize(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

CameraPose pose_looking_at_origin(const Vec3& position) {
  const Vec3 origin{0.0, 0.0, 0.0};
  try {
    return {position, geom::look_at(position, origin, UnitVec3(geom::kCameraUp))};
  } catch (const DegenerateLookAt&) {
    return {position, geom::look_at(position, origin, UnitVec3({0.0, 0.0, 1.0}))};
  }
}

CameraPose sample_camera_pose(RngStream& rng, double radius) {
  if (!(radius > kSceneBound) || !std::isfinite(radius)) {
    throw InvalidArgument("camera radius must exceed the scene bound");
  }
  const Vec3 dir = geom::marsaglia_sphere_point(rng);
  return pose_looking_at_origin(dir * radius);
}

Ray primary_ray(const CameraPose& pose, const CameraIntrinsics& intr, int px,
                int py) {
  const double f = intr.focal_length_px();
  const Vec3 cam{(px + 0.5 - 0.5 * intr.width) / f,
                 -(py + 0.5 - 0.5 * intr.height) / f, -1.0};
  return {pose.position, UnitVec3(pose.orientation.rotate(cam))};
}

std::optional<double> intersect_triangle(const Ray& ray, const Vec3& a,
                                         const Vec3& b, const Vec3& c) {
  constexpr double kEps = 1e-12;
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3& d = ray.direction.vec();
  const Vec3 p = cross(d, e2);
  const double det = dot(e1, p);
  if (std::abs(det) < kEps) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = ray.origin - a;
  const double u = dot(s, p) * inv;
  if (u < 0.0 || u > 1.0) return std::nullopt;
  const Vec3 q = cross(s, e1);
  const double v = dot(d, q) * inv;
  if (v < 0.0 || u + v > 1.0) return std::nullopt;
  const double t = dot(e2, q) * inv;
  if (t <= kEps) return std::nullopt;
  return t;
}

// TriangleSet ---------------------------------------------------------------

namespace {

constexpr int kLeafSize = 4;

Vec3 centroid(const std::array<Vec3, 3>& t) {
  return (t[0] + t[1] + t[2]) * (1.0 / 3.0);
}

double axis(const Vec3& v, int k) { return k == 0 ? v.x : (k == 1 ? v.y : v.z); }

// Slab test; returns the entry distance or nullopt.
std::optional<double> hit_box(const Aabb& box, const Vec3& o, const Vec3& inv,
                              double t_max) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int k = 0; k < 3; ++k) {
    double a = (axis(box.lo, k) - axis(o, k)) * axis(inv, k);
    double b = (axis(box.hi, k) - axis(o, k)) * axis(inv, k);
    if (a > b) std::swap(a, b);
    // NaN from 0 * inf means the ray lies in the slab plane; keep going.
    if (!std::isnan(a)) t0 = std::max(t0, a);
    if (!std::isnan(b)) t1 = std::min(t1, b);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

Vec3 inverse_direction(const Vec3& d) { return {1.0 / d.x, 1.0 / d.y, 1.0 / d.z}; }

}  // namespace

TriangleSet::TriangleSet(std::span<const TriangleMesh> meshes) {
  for (const auto& m : meshes) {
    for (const auto& t : m.triangles) {
      std::array<Vec3, 3> tri{m.vertices[t[0]], m.vertices[t[1]],
                              m.vertices[t[2]]};
      const Vec3 n = cross(tri[1] - tri[0], tri[2] - tri[0]);
      const double len = norm(n);
      if (!(len > 0.0)) continue;  // zero-area triangles are never hit
      triangles_.push_back(tri);
      normals_.push_back(n * (1.0 / len));
    }
  }
  if (!triangles_.empty()) {
    nodes_.reserve(2 * triangles_.size());
    build(0, static_cast<int>(triangles_.size()));
  }
}

int TriangleSet::build(int first, int count) {
  const int index = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  Aabb box;
  Aabb centers;
  for (int i = first; i < first + count; ++i) {
    for (const Vec3& v : triangles_[i]) box.extend(v);
    centers.extend(centroid(triangles_[i]));
  }
  nodes_[index].box = box;
  if (count <= kLeafSize) {
    nodes_[index].first = first;
    nodes_[index].count = count;
    return index;
  }
  const Vec3 extent = centers.hi - centers.lo;
  int k = 0;
  if (extent.y > extent.x) k = 1;
  if (extent.z > axis(extent, k)) k = 2;
  std::vector<int> order(count);
  std::iota(order.begin(), order.end(), first);
  const int half = count / 2;
  std::nth_element(order.begin(), order.begin() + half, order.end(),
                   [&](int a, int b) {
                     const double ca = axis(centroid(triangles_[a]), k);
                     const double cb = axis(centroid(triangles_[b]), k);
                     return ca < cb || (ca == cb && a < b);
                   });
  std::vector<std::array<Vec3, 3>> tris(count);
  std::vector<Vec3> norms(count);
  for (int i = 0; i < count; ++i) {
    tris[i] = triangles_[order[i]];
    norms[i] = normals_[order[i]];
  }
  std::copy(tris.begin(), tris.end(), triangles_.begin() + first);
  std::copy(norms.begin(), norms.end(), normals_.begin() + first);
  const int left = build(first, half);
  const int right = build(first + half, count - half);
  nodes_[index].first = left;
  nodes_[index].right = right;
  nodes_[index].count = 0;
  return index;
}

std::optional<TriangleSet::Hit> TriangleSet::closest_hit(const Ray& ray) const {
  if (nodes_.empty()) return std::nullopt;
  const Vec3 inv = inverse_direction(ray.direction.vec());
  std::optional<Hit> best;
  double t_best = INFINITY;
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!hit_box(node.box, ray.origin, inv, t_best)) continue;
    if (node.count > 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const auto& t = triangles_[i];
        auto hit = intersect_triangle(ray, t[0], t[1], t[2]);
        // Ties go to the lower index so results do not depend on traversal.
        if (hit && (*hit < t_best || (*hit == t_best && i < best->triangle))) {
          t_best = *hit;
          best = Hit{*hit, i};
        }
      }
    } else {
      stack[top++] = node.right;
      stack[top++] = node.first;
    }
  }
  return best;
}

bool TriangleSet::occluded(const Ray& ray, double t_min, double t_max) const {
  if (nodes_.empty()) return false;
  const Vec3 inv = inverse_direction(ray.direction.vec());
  int stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!hit_box(node.box, ray.origin, inv, t_max)) continue;
    if (node.count > 0) {
      for (int i = node.first; i < node.first + node.count; ++i) {
        const auto& t = triangles_[i];
        auto hit = intersect_triangle(ray, t[0], t[1], t[2]);
        if (hit && *hit > t_min && *hit < t_max) return true;
      }
    } else {
      stack[top++] = node.right;
      stack[top++] = node.first;
    }
  }
  return false;
}

// Shading -------------------------------------------------------------------

namespace {

struct Linear {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

constexpr double kShadowBias = 1e-7;

// Direct light factor in [0, 1] at a surface point with normal n.
double direct_light(const TriangleSet& set, const LightingConfig& lighting,
                    const Vec3& p, const Vec3& n) {
  if (lighting.mode == Lighting::kHomogeneous) {
    // Six unit directional lights along +-x, +-y, +-z, each scaled by 1/sqrt(3)
    // so the sum never exceeds one.
    return (std::abs(n.x) + std::abs(n.y) + std::abs(n.z)) / std::sqrt(3.0);
  }
  const Vec3 to_lamp = lighting.lamp_position - p;
  const double dist = norm(to_lamp);
  if (!(dist > 0.0)) return 0.0;
  const Vec3 l = to_lamp * (1.0 / dist);
  const double cos_theta = dot(n, l);
  if (cos_theta <= 0.0) return 0.0;
  const Ray shadow{p + n * kShadowBias, UnitVec3::from_unit(l)};
  if (set.occluded(shadow, 0.0, dist - kShadowBias)) return 0.0;
  // Inverse-square falloff normalised to one at the origin.
  const double intensity = squared_norm(lighting.lamp_position);
  return std::min(1.0, cos_theta * intensity / (dist * dist));
}

std::optional<Linear> shade(const TriangleSet& set,
                            const LightingConfig& lighting, const Ray& ray) {
  const auto hit = set.closest_hit(ray);
  if (!hit) return std::nullopt;
  Vec3 n = set.normal(hit->triangle);
  if (dot(n, ray.direction.vec()) > 0.0) n = -n;
  const Vec3 p = ray.origin + ray.direction.vec() * hit->t;
  const double lit = direct_light(set, lighting, p, n);
  const double k = kAmbient + (1.0 - kAmbient) * lit;
  const Rgb& m = lighting.material_color;
  const Rgb& c = lighting.lamp_color;
  return Linear{m.r * k * (c.r / 255.0), m.g * k * (c.g / 255.0),
                m.b * k * (c.b / 255.0)};
}

std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

Ray offset_ray(const CameraPose& pose, const CameraIntrinsics& intr, double sx,
               double sy) {
  const double f = intr.focal_length_px();
  const Vec3 cam{(sx - 0.5 * intr.width) / f, -(sy - 0.5 * intr.height) / f,
                 -1.0};
  return {pose.position, UnitVec3(pose.orientation.rotate(cam))};
}

}  // namespace

Image render(std::span<const TriangleMesh> meshes, const CameraPose& pose,
             const LightingConfig& lighting, const CameraIntrinsics& intr,
             const RenderOptions& options) {
  intr.validate();
  const TriangleSet set(meshes);
  Image image(intr.width, intr.height);
  const Linear background{double(kBackground.r), double(kBackground.g),
                          double(kBackground.b)};

  auto render_row = [&](int y) {
    for (int x = 0; x < intr.width; ++x) {
      Linear acc;
      if (options.supersample) {
        for (int s = 0; s < 4; ++s) {
          const Ray ray = offset_ray(pose, intr, x + 0.25 + 0.5 * (s % 2),
                                     y + 0.25 + 0.5 * (s / 2));
          const Linear c = shade(set, lighting, ray).value_or(background);
          acc.r += c.r / 4.0;
          acc.g += c.g / 4.0;
          acc.b += c.b / 4.0;
        }
      } else {
        const auto c = shade(set, lighting, primary_ray(pose, intr, x, y));
        if (!c) continue;
        acc = *c;
      }
      image.set(x, y, {quantize(acc.r), quantize(acc.g), quantize(acc.b)});
    }
  };

  int threads = options.threads > 0
                    ? options.threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, intr.height);
  std::atomic<int> next_row{0};
  std::atomic<bool> timed_out{false};
  auto worker = [&] {
    for (int y = next_row++; y < intr.height; y = next_row++) {
      if (timed_out) return;
      if (options.deadline &&
          std::chrono::steady_clock::now() > *options.deadline) {
        timed_out = true;
        return;
      }
      render_row(y);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (timed_out) throw RenderTimeout("render exceeded its deadline");
  return image;
}

Image render(const scenegen::Scene& scene, const CameraPose& pose,
             const LightingConfig& lighting, const CameraIntrinsics& intr,
             const RenderOptions& options) {
  std::vector<TriangleMesh> meshes;
  meshes.reserve(scene.objects.size());
  for (const auto& o : scene.objects) meshes.push_back(o.mesh);
  return render(meshes, pose, lighting, intr, options);
}

double image_variance(const Image& image) {
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  if (n == 0) return 0.0;
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = image.pixels[i * 3 + c];
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / n;
    total += sum_sq / n - mean * mean;
  }
  return total / 3.0;
}

}  // namespace polyscene::render
