// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/dataset.h"

#include <cstdio>
#include <fstream>

#include "polyscene/errors.h"
#include "polyscene/obj.h"
#include "polyscene/png.h"
#include "polyscene/zip.h"

namespace polyscene::dataset {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json vec_json(const geom::Vec3& v) {
  return {{"x", v.x}, {"y", v.y}, {"z", v.z}};
}

ordered_json quat_json(const geom::Quaternion& q) {
  return {{"qw", q.w}, {"qx", q.x}, {"qy", q.y}, {"qz", q.z}};
}

ordered_json transform_json(const Transform& t) {
  return {{"translation", vec_json(t.translation)},
          {"rotation", quat_json(t.rotation)}};
}

template <typename T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ParseError(0, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(0, std::string("field '") + key + "' has the wrong type");
  }
}

Transform transform_from_json(const json& j) {
  const json t = field<json>(j, "translation");
  const json r = field<json>(j, "rotation");
  return {{field<double>(t, "x"), field<double>(t, "y"), field<double>(t, "z")},
          {field<double>(r, "qw"), field<double>(r, "qx"),
           field<double>(r, "qy"), field<double>(r, "qz")}};
}

scenegen::Lighting lighting_from(const std::string& s) {
  auto l = scenegen::parse_lighting(s);
  if (!l) throw ParseError(0, "unknown lighting '" + s + "'");
  return *l;
}

}  // namespace

std::string view_stem(const std::string& scene_id, int view_index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%05d", view_index);
  return scene_id + buf;
}

ordered_json to_json(const Annotation& a) {
  ordered_json j;
  j["schema_version"] = a.schema_version;
  j["scene_id"] = a.scene_id;
  j["view_index"] = a.view_index;
  j["user_params"] = {
      {"num_objects", a.user_params.num_objects},
      {"layout", scenegen::to_string(a.user_params.layout)},
      {"lighting", scenegen::to_string(a.user_params.lighting)},
      {"num_views", a.user_params.num_views}};
  if (a.generator_params) {
    j["generator_params"] = {
        {"num_planes", a.generator_params->num_planes},
        {"prob_intersection", a.generator_params->prob_intersection},
        {"attempts", a.generator_params->attempts}};
  } else {
    j["generator_params"] = nullptr;
  }
  j["object_transform"] = transform_json(a.object_transform);
  j["camera_transform"] = transform_json(a.camera_transform);
  j["image_file"] = a.image_file;
  return j;
}

Annotation annotation_from_json(const json& j) {
  Annotation a;
  a.schema_version = field<int>(j, "schema_version");
  a.scene_id = field<std::string>(j, "scene_id");
  a.view_index = field<int>(j, "view_index");
  const json u = field<json>(j, "user_params");
  a.user_params.num_objects = field<int>(u, "num_objects");
  const auto layout = scenegen::parse_layout(field<std::string>(u, "layout"));
  if (!layout) throw ParseError(0, "unknown layout");
  a.user_params.layout = *layout;
  a.user_params.lighting = lighting_from(field<std::string>(u, "lighting"));
  a.user_params.num_views = field<int>(u, "num_views");
  const json g = field<json>(j, "generator_params");
  if (!g.is_null()) {
    a.generator_params = GeneratorRecord{field<int>(g, "num_planes"),
                                         field<double>(g, "prob_intersection"),
                                         field<int>(g, "attempts")};
  }
  a.object_transform = transform_from_json(field<json>(j, "object_transform"));
  a.camera_transform = transform_from_json(field<json>(j, "camera_transform"));
  a.image_file = field<std::string>(j, "image_file");
  return a;
}

render::CameraPose camera_pose(const Annotation& a) {
  return {a.camera_transform.translation, a.camera_transform.rotation};
}

std::vector<std::string> Manifest::files() const {
  std::vector<std::string> out{kManifestName, obj_file};
  for (const auto& stem : views) {
    out.push_back(stem + ".png");
    out.push_back(stem + ".json");
  }
  return out;
}

ordered_json to_json(const Manifest& m) {
  ordered_json j;
  j["schema_version"] = m.schema_version;
  j["scene_id"] = m.scene_id;
  j["seed"] = m.seed;
  j["lighting"] = scenegen::to_string(m.lighting);
  j["num_views"] = m.num_views;
  j["resolution"] = {m.width, m.height};
  j["obj_file"] = m.obj_file;
  ordered_json views = ordered_json::array();
  for (const auto& stem : m.views) {
    views.push_back({{"image", stem + ".png"}, {"annotation", stem + ".json"}});
  }
  j["views"] = views;
  ordered_json failures = ordered_json::array();
  for (const auto& f : m.failures) {
    failures.push_back({{"view_index", f.view_index}, {"reason", f.reason}});
  }
  j["failures"] = failures;
  return j;
}

Manifest manifest_from_json(const json& j) {
  Manifest m;
  m.schema_version = field<int>(j, "schema_version");
  m.scene_id = field<std::string>(j, "scene_id");
  m.seed = field<std::uint64_t>(j, "seed");
  m.lighting = lighting_from(field<std::string>(j, "lighting"));
  m.num_views = field<int>(j, "num_views");
  const auto res = field<std::vector<int>>(j, "resolution");
  if (res.size() != 2) throw ParseError(0, "resolution needs two entries");
  m.width = res[0];
  m.height = res[1];
  m.obj_file = field<std::string>(j, "obj_file");
  for (const json& v : field<json>(j, "views")) {
    const auto image = field<std::string>(v, "image");
    if (image.size() < 4 || image.substr(image.size() - 4) != ".png") {
      throw ParseError(0, "view image must be a .png file");
    }
    m.views.push_back(image.substr(0, image.size() - 4));
  }
  for (const json& f : field<json>(j, "failures")) {
    m.failures.push_back(
        {field<int>(f, "view_index"), field<std::string>(f, "reason")});
  }
  return m;
}

Manifest read_manifest(const fs::path& dir) {
  const auto bytes = read_file(dir / kManifestName);
  try {
    return manifest_from_json(json::parse(bytes.begin(), bytes.end()));
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("manifest: ") + e.what());
  }
}

RngStream view_stream(std::uint64_t seed, int index) {
  // Tagged so view cameras never reuse the generator's attempt streams.
  constexpr std::uint64_t kViewTag = 0x7669657773ull;
  return RngStream(seed).substream(kViewTag).substream(
      static_cast<std::uint64_t>(index));
}

Manifest run_dataset_job(const DatasetJob& job) {
  if (job.num_views < 1) {
    throw InvalidArgument("num_views must be at least 1");
  }
  job.intrinsics.validate();
  std::error_code ec;
  fs::create_directories(job.output_dir, ec);
  if (ec) {
    throw IoError("cannot create " + job.output_dir.string() + ": " +
                  ec.message());
  }

  const std::string obj_text = export_obj(job.scene);
  const scenegen::Scene replay = import_obj(obj_text);
  const std::string& id = job.scene.id;

  Manifest manifest;
  manifest.scene_id = id;
  manifest.seed = job.seed;
  manifest.lighting = job.lighting;
  manifest.num_views = job.num_views;
  manifest.width = job.intrinsics.width;
  manifest.height = job.intrinsics.height;
  manifest.obj_file = id + ".obj";
  write_file(job.output_dir / manifest.obj_file, obj_text);

  Annotation base;
  base.scene_id = id;
  base.user_params = job.scene.user_params;
  base.user_params.lighting = job.lighting;
  base.user_params.num_views = job.num_views;
  if (const auto* g = std::get_if<scenegen::GeneratedSource>(&job.scene.source)) {
    base.generator_params = GeneratorRecord{
        g->params.num_planes, g->params.prob_intersection, g->attempts};
  }

  const auto lighting = render::LightingConfig::for_mode(job.lighting);
  for (int i = 0; i < job.num_views; ++i) {
    const std::string stem = view_stem(id, i);
    try {
      RngStream rng = view_stream(job.seed, i);
      const render::CameraPose pose = render::sample_camera_pose(rng);
      const render::Image image =
          job.renderer ? job.renderer(replay, pose, lighting, job.intrinsics)
                       : render::render(replay, pose, lighting, job.intrinsics,
                                        job.render_options);
      Annotation a = base;
      a.view_index = i;
      a.camera_transform = {pose.position, pose.orientation};
      a.image_file = stem + ".png";
      write_file(job.output_dir / (stem + ".png"), render::encode_png(image));
      write_file(job.output_dir / (stem + ".json"), to_json(a).dump(2) + "\n");
      manifest.views.push_back(stem);
    } catch (const IoError&) {
      throw;
    } catch (const std::exception& e) {
      manifest.failures.push_back({i, e.what()});
    }
  }
  write_file(job.output_dir / kManifestName, to_json(manifest).dump(2) + "\n");
  return manifest;
}

fs::path package_dataset(const fs::path& dir, std::optional<fs::path> archive) {
  if (!fs::exists(dir / kManifestName)) {
    throw IoError("no manifest in " + dir.string());
  }
  const Manifest manifest = read_manifest(dir);
  std::vector<ZipEntry> entries;
  for (const auto& name : manifest.files()) {
    entries.push_back({name, read_file(dir / name)});
  }
  const fs::path base = (dir.lexically_normal() / "").parent_path();
  const fs::path out = archive.value_or(fs::path(base.string() + ".zip"));
  write_file(out, write_zip(std::move(entries)));
  return out;
}

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path.string());
  return bytes;
}

void write_file(const fs::path& path, std::span<const std::uint8_t> bytes) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("cannot write " + path.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot write " + path.string() + ": " + ec.message());
}

void write_file(const fs::path& path, std::string_view text) {
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                             text.size()));
}

}  // namespace polyscene::dataset
