// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "polyscene/scenegen.h"

namespace polyscene::service {

/// Disk-backed map from opaque IDs to scenes. Each record is stored as
/// <dir>/<id>.obj plus <id>.json with the scene's parameters. A scene can
/// also be looked up by its own Scene::id, the identifier written into
/// dataset annotations.
class SceneRegistry {
 public:
  /// Creates `dir` if needed and indexes existing records.
  /// Throws IoError if the directory is unusable.
  explicit SceneRegistry(std::filesystem::path dir);

  /// Persists `scene` under a fresh 128-bit random hex ID.
  std::string register_scene(const scenegen::Scene& scene);

  /// Resolves a registry ID or a Scene::id. Records written by other
  /// processes are picked up on a miss.
  std::shared_ptr<const scenegen::Scene> lookup(const std::string& id) const;

  /// Registry IDs, sorted.
  std::vector<std::string> ids() const;

  std::filesystem::path obj_path(const std::string& id) const;
  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::optional<std::string> resolve_locked(const std::string& id) const;
  void rescan() const;
  std::shared_ptr<const scenegen::Scene> load(const std::string& id) const;

  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, std::string> alias_;  // Scene::id -> ID
  mutable std::map<std::string, std::shared_ptr<const scenegen::Scene>> cache_;
  mutable std::vector<std::string> known_;
};

/// 32 lowercase hex digits from the OS random source.
std::string random_id();

}  // namespace polyscene::service
