// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "polyscene/geom.h"

namespace polyscene::arrangement {

using geom::Plane;
using geom::UnitVec3;
using geom::Vec3;

/// One entry per plane; true means the positive side of the plane.
using SignVector = std::vector<bool>;

/// Faces that lie on the working cube rather than on an arrangement plane
/// carry a negative plane index: -(k + 1) for cube side k.
inline bool is_working_cube_face(int plane_index) { return plane_index < 0; }

struct Face {
  int plane_index = 0;
  /// Indices into Cell::vertices, counter-clockwise seen from outside.
  std::vector<int> vertex_indices;
  UnitVec3 outward_normal{Vec3{0.0, 0.0, 1.0}};
};

/// A convex region of the arrangement. Cells are clipped to the working cube
/// [-R, R]^3 (R = 1.05 by default), which strictly contains the unit ball.
struct Cell {
  SignVector signs;
  std::vector<Vec3> vertices;
  /// Arrangement-wide vertex ids, parallel to `vertices`; equal ids mean the
  /// same point in different cells.
  std::vector<int> vertex_ids;
  std::vector<Face> faces;
  /// Bounded polytope with every vertex strictly inside the unit ball.
  bool bounded = false;
  /// Volume < 1e-9 or an edge shorter than 1e-6; discarded before solids are
  /// picked.
  bool sliver = false;

  int edge_count() const;
  int euler_characteristic() const {
    return static_cast<int>(vertices.size()) - edge_count() +
           static_cast<int>(faces.size());
  }
};

/// Record for two bounded cells that share a 2-face.
struct SharedFace {
  int plane_index = 0;
  double area = 0.0;
};

/// Keyed by (lower cell index, higher cell index).
using AdjacencyMap = std::map<std::pair<int, int>, SharedFace>;

struct ArrangementOptions {
  double tolerance = geom::kDefaultTolerance;
  double working_half_extent = 1.05;
};

class Arrangement {
 public:
  const std::vector<Plane>& planes() const { return planes_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const AdjacencyMap& adjacency() const { return adjacency_; }
  /// Triple-intersection points with norm <= 1.
  const std::vector<Vec3>& ball_vertices() const { return ball_vertices_; }
  double tolerance() const { return tol_; }
  int degenerate_triples() const { return degenerate_triples_; }

  /// Sign vector of `p`, or nullopt when `p` lies on a plane (within tol).
  std::optional<SignVector> classify(const Vec3& p) const;

  /// Index of the cell with the given sign vector.
  std::optional<int> find_cell(const SignVector& signs) const;

  std::vector<int> bounded_cell_indices() const;

 private:
  friend Arrangement build_arrangement(std::span<const Plane>,
                                       const ArrangementOptions&);

  std::vector<Plane> planes_;
  std::vector<Cell> cells_;
  AdjacencyMap adjacency_;
  std::vector<Vec3> ball_vertices_;
  std::unordered_map<SignVector, int> index_;
  double tol_ = geom::kDefaultTolerance;
  int degenerate_triples_ = 0;
};

/// Builds every cell of the arrangement that meets the working cube by
/// breadth-first traversal across shared faces, computing each cell as the
/// working cube clipped by the half-spaces of its sign vector.
///
/// Throws InvalidArgument for an empty plane list or tol <= 0, and
/// DegenerateArrangement when more than half of all plane triples are
/// singular although no two of their planes are parallel.
Arrangement build_arrangement(std::span<const Plane> planes,
                              const ArrangementOptions& options = {});
Arrangement build_arrangement(std::span<const Plane> planes, double tol);

std::vector<Cell> bounded_cells(const Arrangement& arr);

/// Volume by the divergence theorem over fan-triangulated faces.
/// Throws NotBounded for cells that are not bounded.
double cell_volume(const Cell& cell);

/// Closed-polytope volume without the boundedness check.
double polytope_volume(const Cell& cell);

double face_area(const Cell& cell, const Face& face);

const AdjacencyMap& cell_adjacency(const Arrangement& arr);

/// True iff `p` is on the inner side of every face plane within `tol`.
bool point_in_cell(const Cell& cell, const Vec3& p,
                   double tol = geom::kDefaultTolerance);

}  // namespace polyscene::arrangement
