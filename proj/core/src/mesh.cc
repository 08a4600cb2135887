// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/mesh.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <map>
#include <numeric>

namespace polyscene {

bool is_watertight(const TriangleMesh& mesh) {
  // Directed edge -> use count.
  std::map<std::pair<int, int>, int> directed;
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) ++directed[{t[k], t[(k + 1) % 3]}];
  }
  for (const auto& [edge, count] : directed) {
    if (count != 1) return false;
    auto twin = directed.find({edge.second, edge.first});
    if (twin == directed.end() || twin->second != 1) return false;
  }
  return !mesh.triangles.empty();
}

double mesh_volume(const TriangleMesh& mesh) {
  double six_v = 0.0;
  for (const auto& t : mesh.triangles) {
    six_v += dot(mesh.vertices[t[0]],
                 cross(mesh.vertices[t[1]], mesh.vertices[t[2]]));
  }
  return six_v / 6.0;
}

namespace {

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

}  // namespace

std::vector<TriangleMesh> connected_components(const TriangleMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  std::vector<int> parent(nv);
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& t : mesh.triangles) {
    for (int k = 1; k < 3; ++k) {
      const int a = find_root(parent, t[0]);
      const int b = find_root(parent, t[k]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  // Components are ordered by their lowest vertex index.
  std::map<int, int> component_of_root;
  std::vector<bool> used(nv, false);
  for (const auto& t : mesh.triangles) {
    for (int v : t) used[v] = true;
  }
  for (int v = 0; v < nv; ++v) {
    if (!used[v]) continue;
    component_of_root.emplace(find_root(parent, v),
                              static_cast<int>(component_of_root.size()));
  }
  std::vector<TriangleMesh> out(component_of_root.size());
  std::vector<int> local(nv, -1);
  for (int v = 0; v < nv; ++v) {
    if (!used[v]) continue;
    TriangleMesh& m = out[component_of_root[find_root(parent, v)]];
    local[v] = static_cast<int>(m.vertices.size());
    m.vertices.push_back(mesh.vertices[v]);
  }
  for (const auto& t : mesh.triangles) {
    TriangleMesh& m = out[component_of_root[find_root(parent, t[0])]];
    m.triangles.push_back({local[t[0]], local[t[1]], local[t[2]]});
  }
  return out;
}

void Aabb::extend(const geom::Vec3& p) {
  lo = {std::min(lo.x, p.x), std::min(lo.y, p.y), std::min(lo.z, p.z)};
  hi = {std::max(hi.x, p.x), std::max(hi.y, p.y), std::max(hi.z, p.z)};
}

Aabb bounds(const TriangleMesh& mesh) {
  Aabb box;
  for (const auto& v : mesh.vertices) box.extend(v);
  return box;
}

TriangleMesh make_box(const geom::Vec3& lo, const geom::Vec3& hi) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.push_back({(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y,
                          (i & 4) ? hi.z : lo.z});
  }
  // Quads listed counter-clockwise from outside.
  constexpr int kQuads[6][4] = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
                                {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
  for (const auto& q : kQuads) {
    m.triangles.push_back({q[0], q[1], q[2]});
    m.triangles.push_back({q[0], q[2], q[3]});
  }
  return m;
}

TriangleMesh make_uv_sphere(const geom::Vec3& center, double radius,
                            int stacks, int slices) {
  TriangleMesh m;
  m.vertices.push_back(center + geom::Vec3{0.0, 0.0, radius});
  for (int i = 1; i < stacks; ++i) {
    const double theta = std::numbers::pi * i / stacks;
    for (int j = 0; j < slices; ++j) {
      const double phi = 2.0 * std::numbers::pi * j / slices;
      m.vertices.push_back(center + geom::Vec3{radius * std::sin(theta) * std::cos(phi),
                                               radius * std::sin(theta) * std::sin(phi),
                                               radius * std::cos(theta)});
    }
  }
  const int south = static_cast<int>(m.vertices.size());
  m.vertices.push_back(center + geom::Vec3{0.0, 0.0, -radius});
  auto ring = [&](int i, int j) { return 1 + (i - 1) * slices + (j % slices); };
  for (int j = 0; j < slices; ++j) {
    m.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
    m.triangles.push_back({south, ring(stacks - 1, j + 1), ring(stacks - 1, j)});
  }
  for (int i = 1; i + 1 < stacks; ++i) {
    for (int j = 0; j < slices; ++j) {
      m.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)});
      m.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)});
    }
  }
  return m;
}

}  // namespace polyscene
