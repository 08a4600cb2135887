// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/registry.h"

#include <openssl/rand.h>

#include <algorithm>
#include <mutex>

#include <nlohmann/json.hpp>

#include "polyscene/dataset.h"
#include "polyscene/errors.h"
#include "polyscene/obj.h"

namespace polyscene::service {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using scenegen::Scene;

namespace {

bool is_registry_id(const std::string& s) {
  return s.size() == 32 && std::all_of(s.begin(), s.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

ordered_json gen_json(const scenegen::GenParams& p) {
  return {{"num_planes", p.num_planes},
          {"prob_intersection", p.prob_intersection},
          {"max_attempts", p.max_attempts}};
}

scenegen::GenParams gen_from(const json& j) {
  scenegen::GenParams p;
  p.num_planes = j.at("num_planes").get<int>();
  p.prob_intersection = j.at("prob_intersection").get<double>();
  p.max_attempts = j.at("max_attempts").get<int>();
  return p;
}

ordered_json meta_json(const std::string& id, const Scene& scene) {
  ordered_json j;
  j["id"] = id;
  j["scene_id"] = scene.id;
  j["user_params"] = {{"num_objects", scene.user_params.num_objects},
                      {"layout", scenegen::to_string(scene.user_params.layout)},
                      {"lighting", scenegen::to_string(scene.user_params.lighting)},
                      {"num_views", scene.user_params.num_views}};
  if (const auto* g = std::get_if<scenegen::GeneratedSource>(&scene.source)) {
    j["source"] = {{"kind", "generated"},
                   {"seed", g->seed},
                   {"attempts", g->attempts},
                   {"initial_params", gen_json(g->initial_params)},
                   {"params", gen_json(g->params)}};
  } else {
    j["source"] = {{"kind", "imported"},
                   {"filename", std::get<scenegen::ImportedSource>(scene.source).filename}};
  }
  return j;
}

}  // namespace

std::string random_id() {
  unsigned char bytes[16];
  if (RAND_bytes(bytes, sizeof bytes) != 1) {
    throw Error("random source unavailable");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned char b : bytes) {
    out += kHex[b >> 4];
    out += kHex[b & 15];
  }
  return out;
}

SceneRegistry::SceneRegistry(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) {
    throw IoError("cannot use registry directory " + dir_.string());
  }
  std::unique_lock lock(mutex_);
  rescan();
}

fs::path SceneRegistry::obj_path(const std::string& id) const {
  return dir_ / (id + ".obj");
}

void SceneRegistry::rescan() const {
  std::vector<std::string> found;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.path().extension() != ".json") continue;
    const std::string id = entry.path().stem().string();
    if (!is_registry_id(id)) continue;
    found.push_back(id);
    if (std::find(known_.begin(), known_.end(), id) != known_.end()) continue;
    try {
      const auto bytes = dataset::read_file(entry.path());
      const json meta = json::parse(bytes.begin(), bytes.end());
      alias_.emplace(meta.at("scene_id").get<std::string>(), id);
    } catch (const std::exception&) {
      continue;  // unreadable record; lookups by ID still try the OBJ
    }
  }
  std::sort(found.begin(), found.end());
  known_ = std::move(found);
}

std::string SceneRegistry::register_scene(const Scene& scene) {
  std::unique_lock lock(mutex_);
  std::string id;
  do {
    id = random_id();
  } while (fs::exists(dir_ / (id + ".json")));
  dataset::write_file(obj_path(id), dataset::export_obj(scene));
  // The metadata file is the commit point for readers.
  dataset::write_file(dir_ / (id + ".json"), meta_json(id, scene).dump(2) + "\n");
  known_.insert(std::upper_bound(known_.begin(), known_.end(), id), id);
  alias_.emplace(scene.id, id);
  return id;
}

std::optional<std::string> SceneRegistry::resolve_locked(
    const std::string& id) const {
  if (std::binary_search(known_.begin(), known_.end(), id)) return id;
  if (auto it = alias_.find(id); it != alias_.end()) return it->second;
  return std::nullopt;
}

std::shared_ptr<const Scene> SceneRegistry::lookup(const std::string& id) const {
  std::optional<std::string> key;
  {
    std::shared_lock lock(mutex_);
    key = resolve_locked(id);
    if (key) {
      if (auto it = cache_.find(*key); it != cache_.end()) return it->second;
    }
  }
  std::unique_lock lock(mutex_);
  if (!key) {
    rescan();
    key = resolve_locked(id);
    if (!key) return nullptr;
  }
  if (auto it = cache_.find(*key); it != cache_.end()) return it->second;
  auto scene = load(*key);
  if (scene) cache_.emplace(*key, scene);
  return scene;
}

std::shared_ptr<const Scene> SceneRegistry::load(const std::string& id) const {
  if (!fs::exists(obj_path(id))) return nullptr;
  const auto obj = dataset::read_file(obj_path(id));
  const auto meta_bytes = dataset::read_file(dir_ / (id + ".json"));
  auto scene = std::make_shared<Scene>(dataset::import_obj(
      std::string_view(reinterpret_cast<const char*>(obj.data()), obj.size()),
      obj_path(id).string()));
  try {
    const json meta = json::parse(meta_bytes.begin(), meta_bytes.end());
    scene->id = meta.at("scene_id").get<std::string>();
    const json& u = meta.at("user_params");
    scene->user_params.num_objects = u.at("num_objects").get<int>();
    scene->user_params.layout =
        scenegen::parse_layout(u.at("layout").get<std::string>()).value();
    scene->user_params.lighting =
        scenegen::parse_lighting(u.at("lighting").get<std::string>()).value();
    scene->user_params.num_views = u.at("num_views").get<int>();
    const json& src = meta.at("source");
    if (src.at("kind") == "generated") {
      scenegen::GeneratedSource g;
      g.seed = src.at("seed").get<std::uint64_t>();
      g.attempts = src.at("attempts").get<int>();
      g.initial_params = gen_from(src.at("initial_params"));
      g.params = gen_from(src.at("params"));
      scene->source = g;
    } else {
      scene->source = scenegen::ImportedSource{src.at("filename").get<std::string>()};
    }
  } catch (const std::exception& e) {
    throw IoError("corrupt registry record " + id + ": " + e.what());
  }
  return scene;
}

std::vector<std::string> SceneRegistry::ids() const {
  std::unique_lock lock(mutex_);
  rescan();
  return known_;
}

}  // namespace polyscene::service
