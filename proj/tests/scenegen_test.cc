// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/scenegen.h"

#include <gtest/gtest.h>

#include <algorithm>

#include "polyscene/errors.h"
#include "test_util.h"

namespace polyscene::scenegen {
namespace {

using arrangement::Arrangement;
using arrangement::build_arrangement;
using testing_util::axis_plane;
using testing_util::cube_planes;

Arrangement bisected_cube() {
  auto planes = cube_planes(0.2);
  planes.push_back(axis_plane(2, 0.0));
  return build_arrangement(planes);
}

Arrangement octant_cube() {
  auto planes = cube_planes(0.2);
  for (int k = 0; k < 3; ++k) planes.push_back(axis_plane(k, 0.0));
  return build_arrangement(planes);
}

int cell_at(const Arrangement& arr, geom::Vec3 p) {
  return *arr.find_cell(*arr.classify(p));
}

TEST(Names, ParseAndPrint) {
  EXPECT_EQ(parse_layout("Separate"), Layout::kSeparate);
  EXPECT_EQ(parse_layout("TOUCHING"), Layout::kTouching);
  EXPECT_EQ(parse_layout("intersecting"), Layout::kIntersecting);
  EXPECT_FALSE(parse_layout("overlap"));
  EXPECT_EQ(parse_lighting("fixed"), Lighting::kFixedSpotlight);
  EXPECT_EQ(parse_lighting("fixed_spotlight"), Lighting::kFixedSpotlight);
  EXPECT_EQ(parse_lighting("homogenous"), Lighting::kHomogeneous);
  EXPECT_EQ(parse_lighting("homogeneous"), Lighting::kHomogeneous);
  EXPECT_FALSE(parse_lighting("sun"));
  for (Layout l : {Layout::kSeparate, Layout::kTouching, Layout::kIntersecting}) {
    EXPECT_EQ(parse_layout(to_string(l)), l);
  }
  for (Lighting l : {Lighting::kFixedSpotlight, Lighting::kHomogeneous}) {
    EXPECT_EQ(parse_lighting(to_string(l)), l);
  }
}

TEST(Params, Validation) {
  EXPECT_THROW(UserParams{.num_objects = 0}.validate(), InvalidArgument);
  EXPECT_THROW(UserParams{.num_views = 0}.validate(), InvalidArgument);
  EXPECT_NO_THROW(UserParams{}.validate());
  EXPECT_THROW(GenParams{.num_planes = 3}.validate(), InvalidArgument);
  EXPECT_THROW(GenParams{.num_planes = 201}.validate(), InvalidArgument);
  EXPECT_THROW(GenParams{.prob_intersection = 1.5}.validate(), InvalidArgument);
  EXPECT_THROW(GenParams{.max_attempts = 0}.validate(), InvalidArgument);
  EXPECT_THROW(convert_params({.num_objects = kMaxObjects + 1}), Unsatisfiable);
  EXPECT_THROW(convert_params({.num_objects = -1}), InvalidArgument);
}

TEST(Params, ConversionIsMonotoneInObjectCount) {
  for (Layout layout :
       {Layout::kSeparate, Layout::kTouching, Layout::kIntersecting}) {
    int prev = 0;
    for (int n = 1; n <= kMaxObjects; ++n) {
      const GenParams p = convert_params({.num_objects = n, .layout = layout});
      EXPECT_NO_THROW(p.validate());
      EXPECT_GE(p.num_planes, prev) << to_string(layout) << " n=" << n;
      prev = p.num_planes;
    }
  }
}

TEST(Params, CalibrationTableIsSane) {
  const auto table = builtin_calibration();
  ASSERT_FALSE(table.empty());
  for (const auto& e : table) {
    EXPECT_GE(e.num_planes, kMinPlanes);
    EXPECT_LE(e.num_planes, kMaxPlanes);
    EXPECT_GT(e.prob_intersection, 0.0);
    EXPECT_LE(e.prob_intersection, 1.0);
    EXPECT_GE(e.success_rate, 0.0);
    EXPECT_LE(e.success_rate, 1.0);
  }
  const GenParams one = convert_params({.num_objects = 1});
  EXPECT_GE(one.num_planes, 4);
  EXPECT_LE(one.num_planes, 8);
  EXPECT_GT(one.prob_intersection, 0.0);
  EXPECT_LT(one.prob_intersection, 1.0);
}

TEST(Params, MorePlanesForMoreObjects) {
  for (Layout layout :
       {Layout::kSeparate, Layout::kTouching, Layout::kIntersecting}) {
    EXPECT_GT(convert_params({.num_objects = 18, .layout = layout}).num_planes,
              convert_params({.num_objects = 1, .layout = layout}).num_planes)
        << to_string(layout);
  }
}

TEST(Params, IntersectingDrawsMoreSolidsThanSeparate) {
  for (int n : {1, 2, 3, 5, 8, 12, 18}) {
    EXPECT_GT(
        convert_params({.num_objects = n, .layout = Layout::kIntersecting})
            .prob_intersection,
        convert_params({.num_objects = n, .layout = Layout::kSeparate})
            .prob_intersection)
        << "n=" << n;
  }
}

CalibrationSweep synthetic_sweep() {
  CalibrationSweep s;
  s.options.targets = {2, 1};
  s.options.plane_counts = {4, 8, 12};
  s.options.probabilities = {0.1, 0.5};
  s.options.samples = 10;
  // successes[layout][plane count][p][objects]
  s.successes.assign(3, std::vector<std::vector<std::vector<int>>>(
                            3, std::vector<std::vector<int>>(2, std::vector<int>(3))));
  auto& sep = s.successes[0];
  sep[0][0][1] = 1;
  sep[0][1][1] = 2;
  sep[1][0][1] = 9;
  sep[1][1][1] = 3;
  sep[2][0][1] = 10;
  sep[0][1][2] = 10;
  sep[1][1][2] = 5;
  sep[2][1][2] = 6;
  return s;
}

TEST(Calibration, SelectsSmallestSufficientPlaneCount) {
  const auto table = select_calibration(synthetic_sweep());
  ASSERT_EQ(table.size(), 6u);
  EXPECT_EQ(table[0].layout, Layout::kSeparate);
  EXPECT_EQ(table[0].num_objects, 1);
  EXPECT_EQ(table[0].num_planes, 8);
  EXPECT_DOUBLE_EQ(table[0].prob_intersection, 0.1);
  EXPECT_DOUBLE_EQ(table[0].success_rate, 0.9);
  // 4 planes has the best rate for two objects but is below the previous row.
  EXPECT_EQ(table[1].num_objects, 2);
  EXPECT_EQ(table[1].num_planes, 8);
  EXPECT_DOUBLE_EQ(table[1].prob_intersection, 0.5);
  EXPECT_DOUBLE_EQ(table[1].success_rate, 0.5);
  EXPECT_EQ(select_calibration(synthetic_sweep(), 1.0)[0].num_planes, 12);
}

TEST(Calibration, ExtrapolatesWithoutSuccesses) {
  const auto table = select_calibration(synthetic_sweep());
  EXPECT_EQ(table[2].layout, Layout::kTouching);
  EXPECT_EQ(table[2].num_planes, kMinPlanes);
  EXPECT_DOUBLE_EQ(table[2].prob_intersection, 0.5);
  EXPECT_EQ(table[3].num_planes, kMinPlanes + 2);
  EXPECT_DOUBLE_EQ(table[3].success_rate, 0.0);
}

TEST(Calibration, RejectsEmptyGrid) {
  CalibrationOptions o;
  o.samples = 0;
  EXPECT_THROW(run_calibration_sweep(o), InvalidArgument);
  o.samples = 1;
  o.plane_counts.clear();
  EXPECT_THROW(run_calibration_sweep(o), InvalidArgument);
}

TEST(SelectSolids, ExtremesAndDrawCount) {
  const std::vector<int> candidates{3, 5, 8, 13};
  RngStream a(9), b(9), c(9);
  EXPECT_TRUE(select_solids(candidates, 0.0, a).empty());
  EXPECT_EQ(select_solids(candidates, 1.0, b), candidates);
  for (int i = 0; i < 4; ++i) c.uniform01();
  const double next = c.uniform01();
  EXPECT_EQ(a.uniform01(), next);
  EXPECT_EQ(b.uniform01(), next);
  EXPECT_THROW(select_solids(candidates, -0.1, a), InvalidArgument);
}

TEST(SelectSolids, InclusionRate) {
  // 10^4 trials spread over 100 runs of 100 candidates.
  std::vector<int> candidates(100);
  for (int i = 0; i < 100; ++i) candidates[i] = i;
  RngStream rng(4);
  std::size_t picked = 0;
  for (int run = 0; run < 100; ++run) {
    const auto s = select_solids(candidates, 0.5, rng);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    picked += s.size();
  }
  EXPECT_NEAR(picked / 10000.0, 0.5, 0.02);
}

TEST(MergeCells, BisectedCubeIsOneClosedBox) {
  const Arrangement arr = bisected_cube();
  const auto bounded = arr.bounded_cell_indices();
  ASSERT_EQ(bounded.size(), 2u);
  const TriangleMesh mesh = merge_cells(arr, bounded);
  EXPECT_TRUE(is_watertight(mesh));
  EXPECT_NEAR(mesh_volume(mesh), 0.064, 1e-12);
  EXPECT_EQ(mesh.vertices.size(), 12u);
  EXPECT_EQ(mesh.triangles.size(), 20u);
  for (const auto& v : mesh.vertices) EXPECT_GT(std::abs(v.x), 0.1);
}

TEST(MergeCells, SingleCellKeepsAllFaces) {
  const Arrangement arr = bisected_cube();
  const int top = cell_at(arr, {0, 0, 0.1});
  const std::vector<int> one{top};
  const TriangleMesh mesh = merge_cells(arr, one);
  EXPECT_TRUE(is_watertight(mesh));
  EXPECT_NEAR(mesh_volume(mesh), 0.032, 1e-12);
}

TEST(Assemble, FaceNeighbours) {
  const Arrangement arr = bisected_cube();
  const auto solids = arr.bounded_cell_indices();
  EXPECT_TRUE(std::holds_alternative<LayoutViolation>(
      assemble_objects(arr, solids, Layout::kSeparate)));
  const auto touching = std::get<std::vector<SceneObject>>(
      assemble_objects(arr, solids, Layout::kTouching));
  EXPECT_EQ(touching.size(), 2u);
  EXPECT_EQ(classify_layout(touching, arr.adjacency()), Layout::kTouching);
  const auto merged = std::get<std::vector<SceneObject>>(
      assemble_objects(arr, solids, Layout::kIntersecting));
  ASSERT_EQ(merged.size(), 1u);
  EXPECT_EQ(merged[0].cell_indices.size(), 2u);
  EXPECT_EQ(classify_layout(merged, arr.adjacency()), Layout::kIntersecting);
}

TEST(Assemble, SingleCellIsItsOwnObject) {
  const Arrangement arr = build_arrangement(cube_planes(0.2));
  const auto solids = arr.bounded_cell_indices();
  for (Layout layout :
       {Layout::kSeparate, Layout::kTouching, Layout::kIntersecting}) {
    const auto objects =
        std::get<std::vector<SceneObject>>(assemble_objects(arr, solids, layout));
    ASSERT_EQ(objects.size(), 1u);
    ASSERT_EQ(objects[0].cells.size(), 1u);
    EXPECT_EQ(objects[0].cells[0].signs, arr.cells()[solids[0]].signs);
    EXPECT_EQ(objects[0].mesh.vertices.size(), 8u);
    EXPECT_EQ(objects[0].mesh.triangles.size(), 12u);
    EXPECT_NEAR(mesh_volume(objects[0].mesh), 0.064, 1e-12);
    EXPECT_EQ(classify_layout(objects, arr.adjacency()), Layout::kSeparate);
  }
}

TEST(Assemble, VertexContactCountsAsTouching) {
  const Arrangement arr = octant_cube();
  ASSERT_EQ(arr.bounded_cell_indices().size(), 8u);
  const std::vector<int> solids{cell_at(arr, {0.1, 0.1, 0.1}),
                                cell_at(arr, {-0.1, -0.1, -0.1})};
  EXPECT_TRUE(std::holds_alternative<LayoutViolation>(
      assemble_objects(arr, solids, Layout::kSeparate)));
  const auto objects = std::get<std::vector<SceneObject>>(
      assemble_objects(arr, solids, Layout::kIntersecting));
  EXPECT_EQ(objects.size(), 2u);
  EXPECT_EQ(classify_layout(objects, arr.adjacency()), Layout::kTouching);
}

TEST(Assemble, DisjointCellsAreSeparate) {
  auto planes = cube_planes(0.2);
  planes.push_back(axis_plane(0, 0.1));
  planes.push_back(axis_plane(0, -0.1));
  const Arrangement slabs = build_arrangement(planes);
  const std::vector<int> solids{cell_at(slabs, {0.15, 0, 0}),
                                cell_at(slabs, {-0.15, 0, 0})};
  const auto objects = std::get<std::vector<SceneObject>>(
      assemble_objects(slabs, solids, Layout::kSeparate));
  EXPECT_EQ(objects.size(), 2u);
  EXPECT_EQ(classify_layout(objects, slabs.adjacency()), Layout::kSeparate);
}

TEST(Generate, IsDeterministic) {
  const UserParams user{.num_objects = 3, .layout = Layout::kSeparate};
  const Scene a = generate_scene(user, 11);
  const Scene b = generate_scene(user, 11);
  EXPECT_EQ(a.id, b.id);
  EXPECT_EQ(a.id, generated_scene_id(user, 11));
  ASSERT_EQ(a.objects.size(), b.objects.size());
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    EXPECT_EQ(a.objects[i].mesh.vertices, b.objects[i].mesh.vertices);
    EXPECT_EQ(a.objects[i].mesh.triangles, b.objects[i].mesh.triangles);
  }
  EXPECT_NE(generated_scene_id(user, 12), a.id);
}

TEST(Generate, ExhaustionReportsClosestCount) {
  const UserParams user{.num_objects = 200, .layout = Layout::kSeparate};
  try {
    generate_scene(user, 3, 1);
    FAIL() << "expected GenerationExhausted";
  } catch (const GenerationExhausted& e) {
    EXPECT_EQ(e.attempts(), 1);
    EXPECT_GE(e.closest_count(), 0);
    EXPECT_NE(std::string(e.what()).find("after 1 attempts"), std::string::npos);
  }
  EXPECT_THROW(generate_scene(user, 3, 0), InvalidArgument);
}

TEST(Generate, EighteenTouchingObjects) {
  const Scene scene =
      generate_scene({.num_objects = 18, .layout = Layout::kTouching}, 18);
  ASSERT_EQ(scene.objects.size(), 18u);
  EXPECT_EQ(classify_layout(scene.objects, {}), Layout::kTouching);
}

struct GenCase {
  int objects;
  Layout layout;
};

class GenerateLayouts : public ::testing::TestWithParam<GenCase> {};

TEST_P(GenerateLayouts, SatisfiesRequest) {
  const auto [n, layout] = GetParam();
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Scene scene =
        generate_scene({.num_objects = n, .layout = layout}, seed);
    ASSERT_EQ(static_cast<int>(scene.objects.size()), n);
    const auto& src = std::get<GeneratedSource>(scene.source);
    EXPECT_EQ(src.seed, seed);
    EXPECT_GE(src.attempts, 1);
    for (const SceneObject& o : scene.objects) {
      EXPECT_TRUE(is_watertight(o.mesh));
      EXPECT_GT(mesh_volume(o.mesh), 0.0);
      for (const auto& v : o.mesh.vertices) EXPECT_LT(geom::norm(v), 1.0);
    }
    const bool any_merge =
        std::any_of(scene.objects.begin(), scene.objects.end(),
                    [](const SceneObject& o) { return o.cells.size() >= 2; });
    switch (layout) {
      case Layout::kSeparate:
        EXPECT_FALSE(any_merge);
        EXPECT_EQ(classify_layout(scene.objects, {}), Layout::kSeparate);
        break;
      case Layout::kTouching:
        EXPECT_FALSE(any_merge);
        if (n >= 2) {
          EXPECT_EQ(classify_layout(scene.objects, {}), Layout::kTouching);
        }
        break;
      case Layout::kIntersecting:
        EXPECT_TRUE(any_merge);
        break;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(
    Requests, GenerateLayouts,
    ::testing::Values(GenCase{1, Layout::kSeparate}, GenCase{3, Layout::kSeparate},
                      GenCase{2, Layout::kTouching}, GenCase{4, Layout::kTouching},
                      GenCase{1, Layout::kIntersecting},
                      GenCase{3, Layout::kIntersecting}));

}  // namespace
}  // namespace polyscene::scenegen
