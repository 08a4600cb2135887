// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/scenegen.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <unordered_map>

#include "polyscene/errors.h"
#include "polyscene/sampling.h"

namespace polyscene::scenegen {

using arrangement::Arrangement;
using arrangement::Cell;

namespace {

// Consecutive same-direction misses before the controller adjusts.
constexpr int kControllerStreak = 3;

std::string lowercase(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool share_vertex(const Cell& a, const Cell& b) {
  for (int va : a.vertex_ids) {
    if (std::find(b.vertex_ids.begin(), b.vertex_ids.end(), va) !=
        b.vertex_ids.end()) {
      return true;
    }
  }
  return false;
}

bool cells_in_contact(const Arrangement& arr, int a, int b) {
  const auto key = std::minmax(a, b);
  if (arr.adjacency().count({key.first, key.second})) return true;
  return share_vertex(arr.cells()[a], arr.cells()[b]);
}

bool any_contact(const Arrangement& arr, std::span<const int> cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      if (cells_in_contact(arr, cells[i], cells[j])) return true;
    }
  }
  return false;
}

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

// Face-connected components of `solids` (sorted by arrangement index).
std::vector<std::vector<int>> face_components(const Arrangement& arr,
                                              std::span<const int> solids) {
  std::vector<int> sorted(solids.begin(), solids.end());
  std::sort(sorted.begin(), sorted.end());
  std::unordered_map<int, int> slot;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    slot.emplace(sorted[i], static_cast<int>(i));
  }
  std::vector<int> parent(sorted.size());
  std::iota(parent.begin(), parent.end(), 0);
  for (const auto& [pair, face] : arr.adjacency()) {
    auto a = slot.find(pair.first);
    auto b = slot.find(pair.second);
    if (a == slot.end() || b == slot.end()) continue;
    const int ra = find_root(parent, a->second);
    const int rb = find_root(parent, b->second);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }
  std::map<int, std::vector<int>> groups;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    groups[find_root(parent, static_cast<int>(i))].push_back(sorted[i]);
  }
  std::vector<std::vector<int>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  return out;
}

SceneObject make_object(const Arrangement& arr, std::vector<int> cells) {
  SceneObject obj;
  obj.mesh = merge_cells(arr, cells);
  for (int c : cells) obj.cells.push_back(arr.cells()[c]);
  obj.cell_indices = std::move(cells);
  return obj;
}

std::string hex128(std::uint64_t hi, std::uint64_t lo) {
  char buf[33];
  std::snprintf(buf, sizeof buf, "%016llx%016llx",
                static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return buf;
}

}  // namespace

std::string_view to_string(Layout layout) {
  switch (layout) {
    case Layout::kSeparate: return "separate";
    case Layout::kTouching: return "touching";
    case Layout::kIntersecting: return "intersecting";
  }
  return "separate";
}

std::string_view to_string(Lighting lighting) {
  switch (lighting) {
    case Lighting::kFixedSpotlight: return "fixed";
    case Lighting::kHomogeneous: return "homogeneous";
  }
  return "fixed";
}

std::optional<Layout> parse_layout(std::string_view text) {
  const std::string t = lowercase(text);
  if (t == "separate") return Layout::kSeparate;
  if (t == "touching") return Layout::kTouching;
  if (t == "intersecting") return Layout::kIntersecting;
  return std::nullopt;
}

std::optional<Lighting> parse_lighting(std::string_view text) {
  const std::string t = lowercase(text);
  if (t == "fixed" || t == "spotlight" || t == "fixed_spotlight" ||
      t == "fixed-spotlight") {
    return Lighting::kFixedSpotlight;
  }
  if (t == "homogeneous" || t == "homogenous") return Lighting::kHomogeneous;
  return std::nullopt;
}

void UserParams::validate() const {
  if (num_objects < 1) {
    throw InvalidArgument("num_objects must be >= 1 (got " +
                          std::to_string(num_objects) + ")");
  }
  if (num_views < 1) {
    throw InvalidArgument("num_views must be >= 1 (got " +
                          std::to_string(num_views) + ")");
  }
}

void GenParams::validate() const {
  if (num_planes < kMinPlanes || num_planes > kMaxPlanes) {
    throw InvalidArgument("num_planes must be in [4, 200]");
  }
  if (!(prob_intersection >= 0.0 && prob_intersection <= 1.0)) {
    throw InvalidArgument("prob_intersection must be in [0, 1]");
  }
  if (max_attempts < 1) throw InvalidArgument("max_attempts must be >= 1");
}

GenParams convert_params(const UserParams& user) {
  user.validate();
  if (user.num_objects > kMaxObjects) {
    throw Unsatisfiable("num_objects " + std::to_string(user.num_objects) +
                        " exceeds the supported maximum of " +
                        std::to_string(kMaxObjects));
  }
  std::vector<CalibrationEntry> rows;
  for (const CalibrationEntry& e : builtin_calibration()) {
    if (e.layout == user.layout) rows.push_back(e);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return a.num_objects < b.num_objects;
  });
  GenParams out;
  const int n = user.num_objects;
  if (n <= rows.front().num_objects) {
    out.num_planes = rows.front().num_planes;
    out.prob_intersection = rows.front().prob_intersection;
  } else if (n >= rows.back().num_objects) {
    const auto& last = rows.back();
    const double scale = std::cbrt(static_cast<double>(n) / last.num_objects);
    out.num_planes = std::min(
        kMaxPlanes, static_cast<int>(std::ceil(last.num_planes * scale)));
    out.prob_intersection = last.prob_intersection;
  } else {
    auto hi = std::find_if(rows.begin(), rows.end(), [n](const auto& e) {
      return e.num_objects >= n;
    });
    auto lo = hi - 1;
    if (hi->num_objects == n) {
      out.num_planes = hi->num_planes;
      out.prob_intersection = hi->prob_intersection;
    } else {
      const double t = static_cast<double>(n - lo->num_objects) /
                       (hi->num_objects - lo->num_objects);
      out.num_planes = static_cast<int>(
          std::ceil(lo->num_planes + t * (hi->num_planes - lo->num_planes)));
      out.prob_intersection =
          lo->prob_intersection +
          t * (hi->prob_intersection - lo->prob_intersection);
    }
  }
  out.num_planes = std::clamp(out.num_planes, kMinPlanes, kMaxPlanes);
  return out;
}

std::vector<int> select_solids(std::span<const int> candidates, double p,
                               RngStream& rng) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw InvalidArgument("select_solids: p must be in [0, 1]");
  }
  std::vector<int> out;
  for (int c : candidates) {
    if (rng.uniform01() < p) out.push_back(c);
  }
  return out;
}

TriangleMesh merge_cells(const Arrangement& arr,
                         std::span<const int> cell_indices) {
  std::vector<int> members(cell_indices.begin(), cell_indices.end());
  std::sort(members.begin(), members.end());
  std::vector<arrangement::SignVector> member_signs;
  for (int c : members) member_signs.push_back(arr.cells()[c].signs);
  auto is_member = [&](const arrangement::SignVector& s) {
    return std::find(member_signs.begin(), member_signs.end(), s) !=
           member_signs.end();
  };

  TriangleMesh mesh;
  std::unordered_map<int, int> local;
  auto vertex = [&](const Cell& cell, int idx) {
    const int gid = cell.vertex_ids[idx];
    auto [it, inserted] =
        local.emplace(gid, static_cast<int>(mesh.vertices.size()));
    if (inserted) mesh.vertices.push_back(cell.vertices[idx]);
    return it->second;
  };
  for (int c : members) {
    const Cell& cell = arr.cells()[c];
    for (const auto& face : cell.faces) {
      if (!arrangement::is_working_cube_face(face.plane_index)) {
        arrangement::SignVector across = cell.signs;
        across[face.plane_index] = !across[face.plane_index];
        if (members.size() > 1 && is_member(across)) continue;
      }
      const auto& idx = face.vertex_indices;
      const int v0 = vertex(cell, idx[0]);
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        mesh.triangles.push_back(
            {v0, vertex(cell, idx[k]), vertex(cell, idx[k + 1])});
      }
    }
  }
  return mesh;
}

std::variant<std::vector<SceneObject>, LayoutViolation> assemble_objects(
    const Arrangement& arr, std::span<const int> solids, Layout layout) {
  std::vector<int> sorted(solids.begin(), solids.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<SceneObject> objects;
  switch (layout) {
    case Layout::kSeparate:
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        for (std::size_t j = i + 1; j < sorted.size(); ++j) {
          if (cells_in_contact(arr, sorted[i], sorted[j])) {
            return LayoutViolation{"cells " + std::to_string(sorted[i]) +
                                   " and " + std::to_string(sorted[j]) +
                                   " touch"};
          }
        }
      }
      [[fallthrough]];
    case Layout::kTouching:
      for (int c : sorted) objects.push_back(make_object(arr, {c}));
      break;
    case Layout::kIntersecting:
      for (auto& group : face_components(arr, sorted)) {
        objects.push_back(make_object(arr, std::move(group)));
      }
      break;
  }
  return objects;
}

Layout classify_layout(const std::vector<SceneObject>& objects,
                       const arrangement::AdjacencyMap& adjacency) {
  for (const SceneObject& o : objects) {
    if (std::max(o.cells.size(), o.cell_indices.size()) >= 2) {
      return Layout::kIntersecting;
    }
  }
  for (std::size_t i = 0; i < objects.size(); ++i) {
    for (std::size_t j = i + 1; j < objects.size(); ++j) {
      const SceneObject& a = objects[i];
      const SceneObject& b = objects[j];
      for (int ca : a.cell_indices) {
        for (int cb : b.cell_indices) {
          const auto key = std::minmax(ca, cb);
          if (adjacency.count({key.first, key.second})) {
            return Layout::kTouching;
          }
        }
      }
      for (const Cell& ca : a.cells) {
        for (const Cell& cb : b.cells) {
          if (share_vertex(ca, cb)) return Layout::kTouching;
        }
      }
      // Objects without cells (imported): coincident mesh vertices.
      if (a.cells.empty() || b.cells.empty()) {
        for (const auto& va : a.mesh.vertices) {
          for (const auto& vb : b.mesh.vertices) {
            if (va == vb) return Layout::kTouching;
          }
        }
      }
    }
  }
  return Layout::kSeparate;
}

AttemptOutcome run_attempt(const UserParams& user, const GenParams& params,
                           RngStream& rng) {
  using Verdict = AttemptOutcome::Verdict;
  AttemptOutcome out;
  std::vector<geom::Plane> planes;
  planes.reserve(params.num_planes);
  for (int i = 0; i < params.num_planes; ++i) {
    planes.push_back(geom::sample_plane(rng));
  }
  std::optional<Arrangement> arr;
  try {
    arr.emplace(arrangement::build_arrangement(planes));
  } catch (const DegenerateArrangement&) {
    out.verdict = Verdict::kDegenerate;
    return out;
  }
  std::vector<int> candidates;
  for (int idx : arr->bounded_cell_indices()) {
    if (!arr->cells()[idx].sliver) candidates.push_back(idx);
  }
  const std::vector<int> solids =
      select_solids(candidates, params.prob_intersection, rng);
  out.solid_count = static_cast<int>(solids.size());
  auto assembled = assemble_objects(*arr, solids, user.layout);
  if (std::holds_alternative<LayoutViolation>(assembled)) {
    out.verdict = Verdict::kContact;
    out.object_count = static_cast<int>(solids.size());
    return out;
  }
  out.objects = std::move(std::get<std::vector<SceneObject>>(assembled));
  out.object_count = static_cast<int>(out.objects.size());
  if (out.object_count > user.num_objects) {
    out.verdict = Verdict::kTooMany;
  } else if (out.object_count < user.num_objects) {
    out.verdict = Verdict::kTooFew;
  } else if (user.layout == Layout::kTouching && user.num_objects >= 2 &&
             !any_contact(*arr, solids)) {
    out.verdict = Verdict::kNoContact;
  } else if (user.layout == Layout::kIntersecting &&
             std::none_of(out.objects.begin(), out.objects.end(),
                          [](const SceneObject& o) {
                            return o.cell_indices.size() >= 2;
                          })) {
    out.verdict = Verdict::kNoMerge;
  } else if (std::any_of(out.objects.begin(), out.objects.end(),
                         [](const SceneObject& o) {
                           return !is_watertight(o.mesh);
                         })) {
    out.verdict = Verdict::kNotWatertight;
  } else {
    out.verdict = Verdict::kAccepted;
  }
  return out;
}

std::string generated_scene_id(const UserParams& user, std::uint64_t seed) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ static_cast<std::uint64_t>(user.num_objects));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(user.layout) + 0x100));
  const std::uint64_t lo = splitmix64(h ^ 0x7073ULL);
  return "ps-" + hex128(h, lo);
}

Scene generate_scene(const UserParams& user, std::uint64_t seed,
                     int max_attempts) {
  using Verdict = AttemptOutcome::Verdict;
  if (max_attempts < 1) throw InvalidArgument("max_attempts must be >= 1");
  GenParams params = convert_params(user);
  params.max_attempts = max_attempts;
  const GenParams initial = params;
  const RngStream root(seed);
  int closest = -1;
  // Signed run length of same-direction misses: > 0 overshoot, < 0 undershoot.
  int streak = 0;
  auto bump = [&streak](int direction) {
    streak = (streak * direction > 0) ? streak + direction : direction;
    if (std::abs(streak) < kControllerStreak) return false;
    streak = 0;
    return true;
  };
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    RngStream rng = root.substream(static_cast<std::uint64_t>(attempt));
    AttemptOutcome outcome = run_attempt(user, params, rng);
    if (closest < 0 || std::abs(outcome.object_count - user.num_objects) <
                           std::abs(closest - user.num_objects)) {
      closest = outcome.object_count;
    }
    switch (outcome.verdict) {
      case Verdict::kAccepted: {
        Scene scene;
        scene.id = generated_scene_id(user, seed);
        scene.objects = std::move(outcome.objects);
        scene.source = GeneratedSource{initial, params, seed, attempt + 1};
        scene.user_params = user;
        return scene;
      }
      case Verdict::kTooMany:
      case Verdict::kContact:
        if (bump(+1)) params.prob_intersection *= 0.8;
        break;
      case Verdict::kTooFew:
        if (outcome.solid_count >= user.num_objects) {
          // Enough solids, but they merged.
          if (bump(+1)) params.prob_intersection *= 0.8;
        } else if (bump(-1)) {
          params.num_planes = std::min(kMaxPlanes, params.num_planes + 2);
        }
        break;
      case Verdict::kNoContact:
      case Verdict::kNoMerge:
        if (bump(-1)) {
          params.prob_intersection =
              std::min(1.0, params.prob_intersection * 1.25);
        }
        break;
      case Verdict::kNotWatertight:
      case Verdict::kDegenerate:
        break;
    }
  }
  throw GenerationExhausted(
      "generation exhausted after " + std::to_string(max_attempts) +
          " attempts; closest attempt had " + std::to_string(closest) +
          " objects (wanted " + std::to_string(user.num_objects) + ")",
      max_attempts, closest);
}

double CalibrationSweep::rate(Layout layout, std::size_t plane_index,
                              std::size_t p_index, int target) const {
  const auto& counts =
      successes[static_cast<int>(layout)][plane_index][p_index];
  if (target < 0 || target >= static_cast<int>(counts.size())) return 0.0;
  return static_cast<double>(counts[target]) / options.samples;
}

CalibrationSweep run_calibration_sweep(const CalibrationOptions& options) {
  if (options.samples < 1) throw InvalidArgument("samples must be >= 1");
  if (options.targets.empty() || options.plane_counts.empty() ||
      options.probabilities.empty()) {
    throw InvalidArgument("calibration grid is empty");
  }
  const std::size_t np = options.probabilities.size();
  const int max_target =
      *std::max_element(options.targets.begin(), options.targets.end());
  CalibrationSweep sweep;
  sweep.options = options;
  auto& hits = sweep.successes;
  hits.assign(3, std::vector<std::vector<std::vector<int>>>(
                     options.plane_counts.size(),
                     std::vector<std::vector<int>>(
                         np, std::vector<int>(max_target + 1))));
  const RngStream root(options.seed);
  for (std::size_t pi = 0; pi < options.plane_counts.size(); ++pi) {
    const int n = options.plane_counts[pi];
    for (int s = 0; s < options.samples; ++s) {
      RngStream rng = root.substream(static_cast<std::uint64_t>(n) * 1000003ULL +
                                     static_cast<std::uint64_t>(s));
      std::vector<geom::Plane> planes;
      for (int i = 0; i < n; ++i) planes.push_back(geom::sample_plane(rng));
      std::optional<Arrangement> arr;
      try {
        arr.emplace(arrangement::build_arrangement(planes));
      } catch (const DegenerateArrangement&) {
        continue;
      }
      std::vector<std::pair<int, double>> draws;
      for (int idx : arr->bounded_cell_indices()) {
        if (!arr->cells()[idx].sliver) draws.emplace_back(idx, rng.uniform01());
      }
      for (std::size_t k = 0; k < np; ++k) {
        std::vector<int> solids;
        for (const auto& [idx, u] : draws) {
          if (u < options.probabilities[k]) solids.push_back(idx);
        }
        const int count = static_cast<int>(solids.size());
        if (count == 0) continue;
        const bool contact = any_contact(*arr, solids);
        if (count <= max_target) {
          if (!contact) ++hits[0][pi][k][count];
          if (contact || count == 1) ++hits[1][pi][k][count];
        }
        const auto groups = face_components(*arr, solids);
        const int ng = static_cast<int>(groups.size());
        if (ng > max_target) continue;
        bool merged = false;
        bool sealed = true;
        for (const auto& g : groups) {
          if (g.size() < 2) continue;
          merged = true;
          sealed = sealed && is_watertight(merge_cells(*arr, g));
        }
        if (merged && sealed) ++hits[2][pi][k][ng];
      }
    }
  }
  return sweep;
}

std::vector<CalibrationEntry> select_calibration(const CalibrationSweep& sweep,
                                                 double sufficient) {
  const auto& o = sweep.options;
  std::vector<int> targets = o.targets;
  std::sort(targets.begin(), targets.end());
  std::vector<CalibrationEntry> table;
  for (int l = 0; l < 3; ++l) {
    const auto layout = static_cast<Layout>(l);
    int previous = 0;
    double previous_p = 0.5;
    for (int target : targets) {
      // Best p and rate per admissible plane count.
      std::vector<std::pair<std::size_t, double>> best_p(o.plane_counts.size(),
                                                         {0, -1.0});
      double overall = -1.0;
      for (std::size_t pi = 0; pi < o.plane_counts.size(); ++pi) {
        if (o.plane_counts[pi] < previous) continue;
        for (std::size_t k = 0; k < o.probabilities.size(); ++k) {
          const double r = sweep.rate(layout, pi, k, target);
          if (r > best_p[pi].second) best_p[pi] = {k, r};
        }
        overall = std::max(overall, best_p[pi].second);
      }
      CalibrationEntry e{layout, target, 0, 0.0, 0.0};
      std::optional<std::size_t> chosen;
      for (std::size_t pi = 0; pi < o.plane_counts.size(); ++pi) {
        if (o.plane_counts[pi] < previous || best_p[pi].second <= 0.0) continue;
        if (best_p[pi].second >= sufficient * overall &&
            (!chosen || o.plane_counts[pi] < o.plane_counts[*chosen])) {
          chosen = pi;
        }
      }
      if (chosen) {
        e.num_planes = o.plane_counts[*chosen];
        e.prob_intersection = o.probabilities[best_p[*chosen].first];
        e.success_rate = best_p[*chosen].second;
      } else {
        // No successes on the grid: extrapolate past the previous plane count.
        e.num_planes = std::clamp(previous + 2, kMinPlanes, kMaxPlanes);
        e.prob_intersection = previous_p;
      }
      previous = e.num_planes;
      previous_p = e.prob_intersection;
      table.push_back(e);
    }
  }
  return table;
}

std::vector<CalibrationEntry> calibrate(const CalibrationOptions& options) {
  return select_calibration(run_calibration_sweep(options));
}

}  // namespace polyscene::scenegen
