// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "polyscene/arrangement.h"
#include "polyscene/mesh.h"
#include "polyscene/rng.h"

namespace polyscene::scenegen {

enum class Layout { kSeparate, kTouching, kIntersecting };
enum class Lighting { kFixedSpotlight, kHomogeneous };

std::string_view to_string(Layout layout);
std::string_view to_string(Lighting lighting);
/// Accepts "separate", "touching", "intersecting" (case-insensitive).
std::optional<Layout> parse_layout(std::string_view text);
/// Accepts "fixed", "spotlight", "fixed_spotlight", "homogeneous" and the
/// alternate spelling "homogenous".
std::optional<Lighting> parse_lighting(std::string_view text);

/// Upper bound on requested objects.
inline constexpr int kMaxObjects = 200;
inline constexpr int kMinPlanes = 4;
inline constexpr int kMaxPlanes = 200;
inline constexpr int kDefaultMaxAttempts = 100;

/// Parameters as the user states them.
struct UserParams {
  int num_objects = 1;
  Layout layout = Layout::kSeparate;
  Lighting lighting = Lighting::kFixedSpotlight;
  int num_views = 1;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;

  friend bool operator==(const UserParams&, const UserParams&) = default;
};

/// Parameters the plane-arrangement generator runs with.
struct GenParams {
  int num_planes = kMinPlanes;
  double prob_intersection = 0.5;
  int max_attempts = kDefaultMaxAttempts;

  void validate() const;

  friend bool operator==(const GenParams&, const GenParams&) = default;
};

/// A scene object: one or more arrangement cells and their merged boundary.
/// Imported objects have a mesh but no cells.
struct SceneObject {
  std::vector<arrangement::Cell> cells;
  /// Indices of `cells` in the arrangement they came from.
  std::vector<int> cell_indices;
  TriangleMesh mesh;
};

struct GeneratedSource {
  GenParams initial_params;
  /// Parameters of the accepted attempt after controller adjustments.
  GenParams params;
  std::uint64_t seed = 0;
  int attempts = 0;
};

struct ImportedSource {
  std::string filename;
};

struct Scene {
  std::string id;
  std::vector<SceneObject> objects;
  std::variant<GeneratedSource, ImportedSource> source;
  UserParams user_params;
  /// Non-fatal import diagnostics (for example open meshes).
  std::vector<std::string> warnings;
};

/// Initial generator parameters for the user's request, read from a
/// calibration table. Throws Unsatisfiable above kMaxObjects.
GenParams convert_params(const UserParams& user);

/// Includes each candidate independently with probability p. Draws exactly
/// one uniform per candidate regardless of p.
std::vector<int> select_solids(std::span<const int> candidates, double p,
                               RngStream& rng);

struct LayoutViolation {
  std::string reason;
};

/// Groups solid cells into objects according to `layout`.
/// Separate: one object per cell, violation on any shared face or vertex.
/// Touching: one object per cell.
/// Intersecting: face-connected components merged into one boundary mesh.
std::variant<std::vector<SceneObject>, LayoutViolation> assemble_objects(
    const arrangement::Arrangement& arr, std::span<const int> solids,
    Layout layout);

/// Layout implied by a set of generated objects.
Layout classify_layout(const std::vector<SceneObject>& objects,
                       const arrangement::AdjacencyMap& adjacency);

/// Boundary mesh of a face-connected union of cells; faces shared by two
/// member cells are dropped.
TriangleMesh merge_cells(const arrangement::Arrangement& arr,
                         std::span<const int> cell_indices);

/// Outcome of one generator run with fixed parameters.
struct AttemptOutcome {
  enum class Verdict { kAccepted, kTooMany, kTooFew, kContact, kNoContact,
                       kNoMerge, kNotWatertight, kDegenerate };
  Verdict verdict = Verdict::kDegenerate;
  int object_count = 0;
  int solid_count = 0;
  std::vector<SceneObject> objects;
};

/// Runs one attempt: sample planes, build the arrangement, pick solids,
/// assemble objects and check the layout predicate.
AttemptOutcome run_attempt(const UserParams& user, const GenParams& params,
                           RngStream& rng);

/// Repeats attempts (each with its own sub-stream of `seed`) until one yields
/// exactly user.num_objects objects satisfying the layout. Between attempts
/// the parameters are nudged after three misses in the same direction: too
/// many objects, unwanted contact, or too few objects from enough solid cells
/// scales p by 0.8; too few solid cells adds two planes; a missing contact or
/// merge scales p by 1.25.
///
/// Throws GenerationExhausted after `max_attempts`.
Scene generate_scene(const UserParams& user, std::uint64_t seed,
                     int max_attempts = kDefaultMaxAttempts);

/// Deterministic identifier for a generated scene.
std::string generated_scene_id(const UserParams& user, std::uint64_t seed);

// Calibration ---------------------------------------------------------------

struct CalibrationEntry {
  Layout layout;
  int num_objects;
  int num_planes;
  double prob_intersection;
  /// Fraction of single attempts that succeeded at this setting.
  double success_rate;
};

struct CalibrationOptions {
  std::vector<int> targets{1, 2, 3, 4, 5, 6, 8, 10, 12, 15, 18};
  std::vector<int> plane_counts{4,  6,  8,  10, 12, 14, 16,
                                18, 20, 24, 28, 32, 40, 48};
  std::vector<double> probabilities{0.005, 0.01, 0.015, 0.02, 0.03, 0.05,
                                    0.07,  0.1,  0.15,  0.2,  0.3,  0.4,
                                    0.5,   0.6,  0.7,   0.8,  0.9};
  int samples = 1000;
  std::uint64_t seed = 1;
};

/// Single-attempt success counts over the (num_planes, p) grid.
struct CalibrationSweep {
  CalibrationOptions options;
  /// successes[layout][plane index][p index][object count]
  std::vector<std::vector<std::vector<std::vector<int>>>> successes;

  double rate(Layout layout, std::size_t plane_index, std::size_t p_index,
              int target) const;
};

CalibrationSweep run_calibration_sweep(const CalibrationOptions& options);

/// For each layout and target (ascending), picks the smallest plane count, no
/// smaller than the previous target's, whose best rate reaches `sufficient`
/// times the best rate still available, and the best p at that plane count.
std::vector<CalibrationEntry> select_calibration(const CalibrationSweep& sweep,
                                                 double sufficient = 0.8);

std::vector<CalibrationEntry> calibrate(const CalibrationOptions& options);

/// The table convert_params reads.
std::span<const CalibrationEntry> builtin_calibration();

}  // namespace polyscene::scenegen
