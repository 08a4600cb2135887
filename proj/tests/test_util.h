// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyscene/geom.h"
#include "polyscene/mesh.h"
#include "polyscene/scenegen.h"

namespace testing_util {

/// Returns the scripted values in order, ignoring the requested range.
class ScriptedUniforms {
 public:
  explicit ScriptedUniforms(std::vector<double> values)
      : values_(std::move(values)) {}
  double uniform(double, double) {
    if (next_ >= values_.size()) throw std::out_of_range("script exhausted");
    return values_[next_++];
  }
  std::size_t consumed() const { return next_; }

 private:
  std::vector<double> values_;
  std::size_t next_ = 0;
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("polyscene-test-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline polyscene::geom::Plane axis_plane(int axis, double offset) {
  polyscene::geom::Vec3 n{axis == 0 ? 1.0 : 0.0, axis == 1 ? 1.0 : 0.0,
                          axis == 2 ? 1.0 : 0.0};
  return {offset * n, polyscene::geom::UnitVec3(n)};
}

/// x = +-h, y = +-h, z = +-h.
inline std::vector<polyscene::geom::Plane> cube_planes(double h) {
  std::vector<polyscene::geom::Plane> out;
  for (int k = 0; k < 3; ++k) {
    out.push_back(axis_plane(k, -h));
    out.push_back(axis_plane(k, h));
  }
  return out;
}

/// Scene holding the given meshes as imported objects.
inline polyscene::scenegen::Scene mesh_scene(
    std::vector<polyscene::TriangleMesh> meshes, std::string id = "ps-test") {
  polyscene::scenegen::Scene s;
  s.id = std::move(id);
  for (auto& m : meshes) {
    polyscene::scenegen::SceneObject o;
    o.mesh = std::move(m);
    s.objects.push_back(std::move(o));
  }
  s.source = polyscene::scenegen::ImportedSource{"fixture"};
  s.user_params.num_objects = static_cast<int>(s.objects.size());
  return s;
}

}  // namespace testing_util
