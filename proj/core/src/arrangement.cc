// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/arrangement.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "polyscene/errors.h"
#include "polyscene/rng.h"

namespace polyscene::arrangement {

namespace {

constexpr double kSliverVolume = 1e-9;
constexpr double kSliverEdge = 1e-6;
constexpr double kSnapDistance = 1e-10;

// Polytope used while clipping. Plane ids are "extended": 0..n-1 are the
// arrangement planes, n..n+5 the working cube sides.
struct PVertex {
  Vec3 p;
  std::vector<int> planes;  // sorted
};

struct PFace {
  int plane = 0;
  std::vector<int> verts;
};

struct Polytope {
  std::vector<PVertex> verts;
  std::vector<PFace> faces;
};

void add_plane(std::vector<int>& planes, int id) {
  auto it = std::lower_bound(planes.begin(), planes.end(), id);
  if (it == planes.end() || *it != id) planes.insert(it, id);
}

std::vector<int> common_planes(const std::vector<int>& a,
                               const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

// Orders `ids` counter-clockwise around their centroid as seen from the side
// `outward` points to.
void order_ccw(std::vector<int>& ids, const std::vector<PVertex>& verts,
               const Vec3& outward) {
  Vec3 c{};
  for (int id : ids) c += verts[id].p;
  c = c / static_cast<double>(ids.size());
  const Vec3 helper =
      std::abs(outward.x) < 0.9 ? Vec3{1.0, 0.0, 0.0} : Vec3{0.0, 1.0, 0.0};
  const Vec3 e1 = geom::UnitVec3(cross(helper, outward)).vec();
  const Vec3 e2 = cross(outward, e1);
  std::vector<std::pair<double, int>> keyed;
  keyed.reserve(ids.size());
  for (int id : ids) {
    const Vec3 d = verts[id].p - c;
    keyed.emplace_back(std::atan2(dot(d, e2), dot(d, e1)), id);
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = keyed[i].second;
}

class VertexPool {
 public:
  int intern(const Vec3& p) {
    const auto key = cell_of(p);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          auto it = buckets_.find(hash({key[0] + dx, key[1] + dy, key[2] + dz}));
          if (it == buckets_.end()) continue;
          for (int id : it->second) {
            if (squared_norm(points_[id] - p) <= kSnapDistance * kSnapDistance)
              return id;
          }
        }
      }
    }
    const int id = static_cast<int>(points_.size());
    points_.push_back(p);
    buckets_[hash(key)].push_back(id);
    return id;
  }

  const Vec3& at(int id) const { return points_[id]; }

 private:
  static constexpr double kBucket = 1e-6;

  static std::array<std::int64_t, 3> cell_of(const Vec3& p) {
    return {static_cast<std::int64_t>(std::floor(p.x / kBucket)),
            static_cast<std::int64_t>(std::floor(p.y / kBucket)),
            static_cast<std::int64_t>(std::floor(p.z / kBucket))};
  }
  static std::uint64_t hash(const std::array<std::int64_t, 3>& k) {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(k[0]));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k[1]));
    return splitmix64(h ^ static_cast<std::uint64_t>(k[2]));
  }

  std::vector<Vec3> points_;
  std::unordered_map<std::uint64_t, std::vector<int>> buckets_;
};

class CellBuilder {
 public:
  CellBuilder(std::span<const Plane> planes, double half_extent, double tol)
      : n_(static_cast<int>(planes.size())), tol_(tol) {
    all_.assign(planes.begin(), planes.end());
    for (int axis = 0; axis < 3; ++axis) {
      for (int side = 0; side < 2; ++side) {
        Vec3 e{};
        (axis == 0 ? e.x : axis == 1 ? e.y : e.z) = 1.0;
        const double s = side == 0 ? -1.0 : 1.0;
        // Normal points into the cube.
        all_.push_back(Plane{e * (s * half_extent), geom::UnitVec3(e * -s)});
      }
    }
    for (int corner = 0; corner < 8; ++corner) {
      PVertex v;
      for (int axis = 0; axis < 3; ++axis) {
        const int bit = (corner >> axis) & 1;
        const double c = bit ? half_extent : -half_extent;
        (axis == 0 ? v.p.x : axis == 1 ? v.p.y : v.p.z) = c;
        v.planes.push_back(n_ + 2 * axis + bit);
      }
      std::sort(v.planes.begin(), v.planes.end());
      cube_.verts.push_back(std::move(v));
    }
    for (int axis = 0; axis < 3; ++axis) {
      for (int bit = 0; bit < 2; ++bit) {
        PFace f;
        f.plane = n_ + 2 * axis + bit;
        for (int corner = 0; corner < 8; ++corner) {
          if (((corner >> axis) & 1) == bit) f.verts.push_back(corner);
        }
        order_ccw(f.verts, cube_.verts, outward(f.plane, true));
        cube_.faces.push_back(std::move(f));
      }
    }
  }

  int extended_count() const { return static_cast<int>(all_.size()); }

  Vec3 outward(int plane, bool positive) const {
    const Vec3& n = all_[plane].normal.vec();
    return positive ? -n : n;
  }

  Polytope polytope(const SignVector& signs) {
    Polytope poly = cube_;
    for (int i = 0; i < n_ && !poly.faces.empty(); ++i) {
      clip(poly, i, signs[i]);
    }
    return poly;
  }

 private:
  const Vec3* triple_point(int a, int b, int c) {
    int k[3] = {a, b, c};
    std::sort(k, k + 3);
    const std::uint64_t key = (static_cast<std::uint64_t>(k[0]) << 42) |
                              (static_cast<std::uint64_t>(k[1]) << 21) |
                              static_cast<std::uint64_t>(k[2]);
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(key, geom::three_plane_point(all_[k[0]], all_[k[1]],
                                                       all_[k[2]], tol_))
               .first;
    }
    return it->second ? &*it->second : nullptr;
  }

  PVertex split_edge(const PVertex& a, const PVertex& b, double da, double db,
                     int plane) {
    const Vec3 lerp = a.p + (b.p - a.p) * (da / (da - db));
    PVertex v;
    v.planes = common_planes(a.planes, b.planes);
    v.p = lerp;
    // Prefer the exact triple intersection so every cell sharing this vertex
    // computes identical coordinates.
    for (std::size_t i = 0; i < v.planes.size(); ++i) {
      for (std::size_t j = i + 1; j < v.planes.size(); ++j) {
        const Vec3* p = triple_point(v.planes[i], v.planes[j], plane);
        if (p && squared_norm(*p - lerp) <= 1e-12) {
          v.p = *p;
          i = j = v.planes.size();
          break;
        }
      }
    }
    add_plane(v.planes, plane);
    return v;
  }

  void clip(Polytope& poly, int plane, bool positive) {
    const Plane& pl = all_[plane];
    const double sigma = positive ? 1.0 : -1.0;
    const std::size_t nv = poly.verts.size();
    std::vector<double> dist(nv);
    std::vector<int> state(nv);
    bool any_in = false;
    bool any_out = false;
    for (std::size_t i = 0; i < nv; ++i) {
      dist[i] = sigma * pl.signed_distance(poly.verts[i].p);
      state[i] = dist[i] > tol_ ? 1 : (dist[i] < -tol_ ? -1 : 0);
      any_in |= state[i] == 1;
      any_out |= state[i] == -1;
    }
    if (!any_out) {
      for (std::size_t i = 0; i < nv; ++i) {
        if (state[i] == 0) add_plane(poly.verts[i].planes, plane);
      }
      return;
    }
    if (!any_in) {
      poly = Polytope{};
      return;
    }

    std::vector<PVertex>& verts = poly.verts;
    std::map<std::pair<int, int>, int> split;
    auto split_id = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = split.find(key);
      if (it != split.end()) return it->second;
      const int id = static_cast<int>(verts.size());
      PVertex v = split_edge(verts[a], verts[b], dist[a], dist[b], plane);
      verts.push_back(std::move(v));
      split.emplace(key, id);
      return id;
    };
    for (std::size_t i = 0; i < nv; ++i) {
      if (state[i] == 0) add_plane(verts[i].planes, plane);
    }

    std::vector<PFace> faces;
    for (const PFace& f : poly.faces) {
      PFace out{f.plane, {}};
      const std::size_t m = f.verts.size();
      for (std::size_t k = 0; k < m; ++k) {
        const int cur = f.verts[k];
        const int nxt = f.verts[(k + 1) % m];
        if (state[cur] != -1) out.verts.push_back(cur);
        if ((state[cur] == 1 && state[nxt] == -1) ||
            (state[cur] == -1 && state[nxt] == 1)) {
          out.verts.push_back(split_id(cur, nxt));
        }
      }
      if (out.verts.size() >= 3) faces.push_back(std::move(out));
    }

    PFace cap{plane, {}};
    for (std::size_t i = 0; i < verts.size(); ++i) {
      if (i < nv && state[i] == -1) continue;
      if (std::binary_search(verts[i].planes.begin(), verts[i].planes.end(),
                             plane)) {
        cap.verts.push_back(static_cast<int>(i));
      }
    }
    if (cap.verts.size() >= 3) {
      order_ccw(cap.verts, verts, outward(plane, positive));
      faces.push_back(std::move(cap));
    }

    // Drop clipped-away vertices and renumber in place.
    std::vector<int> remap(verts.size(), -1);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      if (i < nv && state[i] == -1) continue;
      remap[i] = static_cast<int>(kept);
      if (kept != i) verts[kept] = std::move(verts[i]);
      ++kept;
    }
    verts.resize(kept);
    for (PFace& f : faces) {
      for (int& v : f.verts) v = remap[v];
    }
    poly.faces = std::move(faces);
  }

  int n_;
  double tol_;
  std::vector<Plane> all_;
  Polytope cube_;
  std::unordered_map<std::uint64_t, std::optional<Vec3>> cache_;
};

Vec3 face_area_vector(const std::vector<Vec3>& verts,
                      const std::vector<int>& idx) {
  Vec3 sum{};
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
    sum += cross(verts[idx[k]] - verts[idx[0]], verts[idx[k + 1]] - verts[idx[0]]);
  }
  return sum * 0.5;
}

bool has_short_edge(const Cell& cell) {
  for (const Face& f : cell.faces) {
    const std::size_t m = f.vertex_indices.size();
    for (std::size_t k = 0; k < m; ++k) {
      const Vec3& a = cell.vertices[f.vertex_indices[k]];
      const Vec3& b = cell.vertices[f.vertex_indices[(k + 1) % m]];
      if (norm(b - a) < kSliverEdge) return true;
    }
  }
  return false;
}

Cell to_cell(const Polytope& poly, const SignVector& signs, int n,
             const CellBuilder& builder, VertexPool& pool) {
  Cell cell;
  cell.signs = signs;
  std::vector<int> local(poly.verts.size(), -1);
  std::unordered_map<int, int> by_global;
  for (std::size_t i = 0; i < poly.verts.size(); ++i) {
    const int gid = pool.intern(poly.verts[i].p);
    auto [it, inserted] =
        by_global.emplace(gid, static_cast<int>(cell.vertices.size()));
    if (inserted) {
      cell.vertices.push_back(pool.at(gid));
      cell.vertex_ids.push_back(gid);
    }
    local[i] = it->second;
  }
  for (const PFace& pf : poly.faces) {
    Face f;
    const bool cube_side = pf.plane >= n;
    f.plane_index = cube_side ? -(pf.plane - n + 1) : pf.plane;
    for (int v : pf.verts) {
      const int lv = local[v];
      if (f.vertex_indices.empty() || f.vertex_indices.back() != lv) {
        f.vertex_indices.push_back(lv);
      }
    }
    while (f.vertex_indices.size() > 1 &&
           f.vertex_indices.front() == f.vertex_indices.back()) {
      f.vertex_indices.pop_back();
    }
    if (f.vertex_indices.size() < 3) continue;
    f.outward_normal = geom::UnitVec3(
        builder.outward(pf.plane, cube_side ? true : bool(signs[pf.plane])));
    cell.faces.push_back(std::move(f));
  }

  bool inside_ball = true;
  for (const Face& f : cell.faces) {
    if (is_working_cube_face(f.plane_index)) inside_ball = false;
  }
  for (const Vec3& v : cell.vertices) {
    if (!(norm(v) < 1.0)) inside_ball = false;
  }
  cell.bounded = inside_ball;
  const double volume = polytope_volume(cell);
  cell.sliver = volume < kSliverVolume || has_short_edge(cell);
  return cell;
}

std::optional<Vec3> interior_seed(std::span<const Plane> planes, double tol) {
  RngStream rng(0x5EEDULL);
  Vec3 p{};
  for (int attempt = 0; attempt < 10000; ++attempt) {
    double closest = INFINITY;
    for (const Plane& pl : planes) {
      closest = std::min(closest, std::abs(pl.signed_distance(p)));
    }
    if (closest > 1e3 * tol) return p;
    p = {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
  }
  return std::nullopt;
}

}  // namespace

int Cell::edge_count() const {
  std::set<std::pair<int, int>> edges;
  for (const Face& f : faces) {
    const std::size_t m = f.vertex_indices.size();
    for (std::size_t k = 0; k < m; ++k) {
      edges.insert(std::minmax(f.vertex_indices[k],
                               f.vertex_indices[(k + 1) % m]));
    }
  }
  return static_cast<int>(edges.size());
}

std::optional<SignVector> Arrangement::classify(const Vec3& p) const {
  SignVector s(planes_.size());
  for (std::size_t i = 0; i < planes_.size(); ++i) {
    const double d = planes_[i].signed_distance(p);
    if (std::abs(d) <= tol_) return std::nullopt;
    s[i] = d > 0.0;
  }
  return s;
}

std::optional<int> Arrangement::find_cell(const SignVector& signs) const {
  auto it = index_.find(signs);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Arrangement::bounded_cell_indices() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].bounded) out.push_back(static_cast<int>(i));
  }
  return out;
}

Arrangement build_arrangement(std::span<const Plane> planes, double tol) {
  ArrangementOptions options;
  options.tolerance = tol;
  return build_arrangement(planes, options);
}

Arrangement build_arrangement(std::span<const Plane> planes,
                              const ArrangementOptions& options) {
  const double tol = options.tolerance;
  if (planes.empty()) throw InvalidArgument("build_arrangement: no planes");
  if (!(tol > 0.0)) throw InvalidArgument("build_arrangement: tol must be > 0");
  if (planes.size() > (1u << 20)) {
    throw InvalidArgument("build_arrangement: too many planes");
  }

  Arrangement arr;
  arr.planes_.assign(planes.begin(), planes.end());
  arr.tol_ = tol;
  const int n = static_cast<int>(planes.size());

  // Triple scan: in-ball vertices and the degeneracy census.
  std::int64_t triples = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool ij_parallel =
          !(norm(cross(planes[i].normal.vec(), planes[j].normal.vec())) > tol);
      for (int k = j + 1; k < n; ++k) {
        ++triples;
        if (auto v = geom::three_plane_point(planes[i], planes[j], planes[k],
                                             tol)) {
          if (norm(*v) <= 1.0) arr.ball_vertices_.push_back(*v);
          continue;
        }
        const bool parallel_pair =
            ij_parallel ||
            !(norm(cross(planes[i].normal.vec(), planes[k].normal.vec())) >
              tol) ||
            !(norm(cross(planes[j].normal.vec(), planes[k].normal.vec())) >
              tol);
        if (!parallel_pair) ++arr.degenerate_triples_;
      }
    }
  }
  if (triples > 0 && 2 * static_cast<std::int64_t>(arr.degenerate_triples_) >
                         triples) {
    throw DegenerateArrangement(
        "build_arrangement: " + std::to_string(arr.degenerate_triples_) +
        " of " + std::to_string(triples) + " plane triples are singular");
  }

  const auto seed = interior_seed(planes, tol);
  if (!seed) throw DegenerateArrangement("build_arrangement: no seed point");
  SignVector start(n);
  for (int i = 0; i < n; ++i) start[i] = planes[i].signed_distance(*seed) > 0.0;

  CellBuilder builder(planes, options.working_half_extent, tol);
  VertexPool pool;
  struct Link {
    int cell;
    SignVector neighbor;
    int plane;
    double area;
  };
  std::vector<Link> links;
  std::unordered_set<SignVector> seen{start};
  std::deque<SignVector> queue{start};
  while (!queue.empty()) {
    SignVector signs = std::move(queue.front());
    queue.pop_front();
    const Polytope poly = builder.polytope(signs);
    // Walk across every face, flipping the face plane alone and together
    // with any plane coincident with it (within tol). Collapsed cells are
    // walked through too so the cells behind them are still found.
    for (const PFace& f : poly.faces) {
      if (f.plane >= n) continue;
      std::vector<int> on = poly.verts[f.verts[0]].planes;
      for (int v : f.verts) on = common_planes(on, poly.verts[v].planes);
      SignVector single = signs;
      single[f.plane] = !single[f.plane];
      SignVector joint = signs;
      for (int k : on) {
        if (k < n) joint[k] = !joint[k];
      }
      for (SignVector* next : {&single, &joint}) {
        if (seen.insert(*next).second) queue.push_back(std::move(*next));
      }
    }
    if (poly.faces.size() < 4) continue;
    Cell cell = to_cell(poly, signs, n, builder, pool);
    if (cell.faces.size() < 4 || !(polytope_volume(cell) > 0.0)) continue;
    const int index = static_cast<int>(arr.cells_.size());
    for (const Face& f : cell.faces) {
      if (is_working_cube_face(f.plane_index)) continue;
      const double area = face_area(cell, f);
      if (!(area > tol * tol)) continue;
      SignVector next = signs;
      next[f.plane_index] = !next[f.plane_index];
      links.push_back({index, std::move(next), f.plane_index, area});
    }
    arr.index_.emplace(signs, index);
    arr.cells_.push_back(std::move(cell));
  }

  for (const Link& link : links) {
    const auto other = arr.find_cell(link.neighbor);
    if (!other) continue;
    if (!arr.cells_[link.cell].bounded || !arr.cells_[*other].bounded) continue;
    const auto key = std::minmax(link.cell, *other);
    arr.adjacency_.emplace(std::pair{key.first, key.second},
                           SharedFace{link.plane, link.area});
  }
  return arr;
}

std::vector<Cell> bounded_cells(const Arrangement& arr) {
  std::vector<Cell> out;
  for (const Cell& c : arr.cells()) {
    if (c.bounded) out.push_back(c);
  }
  return out;
}

double face_area(const Cell& cell, const Face& face) {
  return std::abs(
      dot(face_area_vector(cell.vertices, face.vertex_indices),
          face.outward_normal.vec()));
}

double polytope_volume(const Cell& cell) {
  double six_v = 0.0;
  for (const Face& f : cell.faces) {
    const auto& idx = f.vertex_indices;
    for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
      six_v += dot(cell.vertices[idx[0]],
                   cross(cell.vertices[idx[k]], cell.vertices[idx[k + 1]]));
    }
  }
  return six_v / 6.0;
}

double cell_volume(const Cell& cell) {
  if (!cell.bounded) throw NotBounded("cell_volume: cell is not bounded");
  return std::max(0.0, polytope_volume(cell));
}

const AdjacencyMap& cell_adjacency(const Arrangement& arr) {
  return arr.adjacency();
}

bool point_in_cell(const Cell& cell, const Vec3& p, double tol) {
  for (const Face& f : cell.faces) {
    const Vec3& anchor = cell.vertices[f.vertex_indices.front()];
    if (dot(f.outward_normal.vec(), p - anchor) > tol) return false;
  }
  return !cell.faces.empty();
}

}  // namespace polyscene::arrangement
