// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "polyscene/geom.h"

namespace polyscene {

/// Indexed triangle mesh; triangles wind counter-clockwise seen from outside.
struct TriangleMesh {
  std::vector<geom::Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  bool empty() const { return triangles.empty(); }
};

/// Every undirected edge borders exactly two triangles, which traverse it in
/// opposite directions.
bool is_watertight(const TriangleMesh& mesh);

/// Signed volume enclosed by a closed mesh (positive for outward winding).
double mesh_volume(const TriangleMesh& mesh);

/// Splits a mesh into its vertex-connected components, preserving vertex and
/// triangle order inside each component.
std::vector<TriangleMesh> connected_components(const TriangleMesh& mesh);

struct Aabb {
  geom::Vec3 lo{INFINITY, INFINITY, INFINITY};
  geom::Vec3 hi{-INFINITY, -INFINITY, -INFINITY};

  void extend(const geom::Vec3& p);
  bool valid() const { return lo.x <= hi.x; }
};

Aabb bounds(const TriangleMesh& mesh);

/// Axis-aligned box with outward winding.
TriangleMesh make_box(const geom::Vec3& lo, const geom::Vec3& hi);

/// Latitude-longitude sphere. Vertices lie on the sphere, so the mesh is
/// slightly smaller than the ideal sphere between them.
TriangleMesh make_uv_sphere(const geom::Vec3& center, double radius,
                            int stacks, int slices);

}  // namespace polyscene
