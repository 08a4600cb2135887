// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "polyscene/render.h"
#include "polyscene/scenegen.h"

namespace polyscene::dataset {

inline constexpr int kAnnotationSchemaVersion = 1;
inline constexpr int kManifestSchemaVersion = 1;
inline constexpr const char* kManifestName = "manifest.json";

struct Transform {
  geom::Vec3 translation;
  geom::Quaternion rotation;

  friend bool operator==(const Transform&, const Transform&) = default;
};

struct GeneratorRecord {
  int num_planes = 0;
  double prob_intersection = 0.0;
  int attempts = 0;

  friend bool operator==(const GeneratorRecord&, const GeneratorRecord&) = default;
};

struct Annotation {
  int schema_version = kAnnotationSchemaVersion;
  std::string scene_id;
  int view_index = 0;
  scenegen::UserParams user_params;
  /// Absent for imported scenes.
  std::optional<GeneratorRecord> generator_params;
  Transform object_transform;
  Transform camera_transform;
  std::string image_file;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

nlohmann::ordered_json to_json(const Annotation& a);
/// Throws ParseError when fields are missing or mistyped.
Annotation annotation_from_json(const nlohmann::json& j);

render::CameraPose camera_pose(const Annotation& a);

/// "<scene_id>_<view:05>"
std::string view_stem(const std::string& scene_id, int view_index);

struct DatasetJob {
  scenegen::Scene scene;
  int num_views = 1;
  scenegen::Lighting lighting = scenegen::Lighting::kFixedSpotlight;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  render::CameraIntrinsics intrinsics;
  render::RenderOptions render_options;
  /// Renderer override; defaults to render::render.
  std::function<render::Image(const scenegen::Scene&, const render::CameraPose&,
                              const render::LightingConfig&,
                              const render::CameraIntrinsics&)>
      renderer;
};

struct ViewFailure {
  int view_index = 0;
  std::string reason;
};

struct Manifest {
  int schema_version = kManifestSchemaVersion;
  std::string scene_id;
  std::uint64_t seed = 0;
  scenegen::Lighting lighting = scenegen::Lighting::kFixedSpotlight;
  int num_views = 0;
  int width = 0;
  int height = 0;
  std::string obj_file;
  /// Stems of successfully written views; the files are <stem>.png/.json.
  std::vector<std::string> views;
  std::vector<ViewFailure> failures;

  /// Every file the manifest accounts for, manifest.json included.
  std::vector<std::string> files() const;
};

nlohmann::ordered_json to_json(const Manifest& m);
Manifest manifest_from_json(const nlohmann::json& j);
Manifest read_manifest(const std::filesystem::path& dir);

/// Camera stream for view `index` of a job seeded with `seed`.
RngStream view_stream(std::uint64_t seed, int index);

/// Renders every view of the job's scene from a random camera and writes
/// images, annotations, the scene OBJ and (last) the manifest. The scene is
/// rendered as read back from its OBJ so stored images can be replayed from
/// the exported file. A failing view is recorded and the job continues.
///
/// Throws InvalidArgument for num_views < 1 and IoError on write failures.
Manifest run_dataset_job(const DatasetJob& job);

/// Zips every file listed in dir's manifest into `archive` (default:
/// <dir>.zip). Throws IoError when the manifest or a listed file is missing.
std::filesystem::path package_dataset(
    const std::filesystem::path& dir,
    std::optional<std::filesystem::path> archive = std::nullopt);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);
void write_file(const std::filesystem::path& path, std::string_view text);

}  // namespace polyscene::dataset
