// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/obj.h"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <vector>

#include "polyscene/errors.h"
#include "polyscene/render.h"
#include "polyscene/rng.h"

namespace polyscene::dataset {

using geom::Vec3;
using scenegen::Scene;
using scenegen::SceneObject;

namespace {

constexpr std::string_view kIdPrefix = "# scene_id ";

void append_coord(std::string& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string_view s(buf);
  if (s == "-0.000000") s = "0.000000";
  out += s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::optional<long> parse_long(std::string_view s) {
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

struct RawObject {
  std::string name;
  std::vector<std::array<int, 3>> triangles;  // global vertex indices
};

// Keeps only referenced vertices, ordered by global index.
TriangleMesh compact(const std::vector<Vec3>& vertices,
                     const std::vector<std::array<int, 3>>& triangles) {
  std::map<int, int> local;
  for (const auto& t : triangles) {
    for (int v : t) local.emplace(v, 0);
  }
  TriangleMesh m;
  for (auto& [global, index] : local) {
    index = static_cast<int>(m.vertices.size());
    m.vertices.push_back(vertices[global]);
  }
  for (const auto& t : triangles) {
    m.triangles.push_back({local[t[0]], local[t[1]], local[t[2]]});
  }
  return m;
}

}  // namespace

std::string export_obj(const Scene& scene) {
  std::string out = "# polyscene scene\n";
  if (!scene.id.empty()) {
    out += kIdPrefix;
    out += scene.id;
    out += '\n';
  }
  out += "# objects " + std::to_string(scene.objects.size()) + "\n";
  int base = 1;
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const TriangleMesh m =
        compact(scene.objects[i].mesh.vertices, scene.objects[i].mesh.triangles);
    out += "o object_" + std::to_string(i) + "\n";
    for (const Vec3& v : m.vertices) {
      out += "v ";
      append_coord(out, v.x);
      out += ' ';
      append_coord(out, v.y);
      out += ' ';
      append_coord(out, v.z);
      out += '\n';
    }
    for (const auto& t : m.triangles) {
      out += "f " + std::to_string(t[0] + base) + ' ' +
             std::to_string(t[1] + base) + ' ' + std::to_string(t[2] + base) +
             '\n';
    }
    base += static_cast<int>(m.vertices.size());
  }
  return out;
}

std::string content_scene_id(std::string_view bytes) {
  std::uint64_t h1 = 0x243F6A8885A308D3ull;
  std::uint64_t h2 = 0x13198A2E03707344ull;
  for (unsigned char c : bytes) {
    h1 = splitmix64(h1 ^ c);
    h2 = splitmix64(h2 + c + 0x9E37ull);
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%016" PRIx64 "%016" PRIx64,
                splitmix64(h1 ^ bytes.size()), splitmix64(h2));
  return std::string("ps-") + buf;
}

Scene import_obj(std::string_view text, const std::string& filename) {
  std::vector<Vec3> vertices;
  std::vector<RawObject> objects;
  bool saw_object = false;
  std::string id;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.substr(0, kIdPrefix.size()) == kIdPrefix && id.empty()) {
      id = std::string(line.substr(kIdPrefix.size()));
      continue;
    }
    const auto tokens = split(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    const std::string_view kw = tokens[0];
    if (kw == "v") {
      if (tokens.size() < 4 || tokens.size() > 5) {
        throw ParseError(line_no, "vertex needs 3 coordinates");
      }
      double c[3];
      for (int k = 0; k < 3; ++k) {
        auto v = parse_double(tokens[k + 1]);
        if (!v) {
          throw ParseError(line_no, "bad coordinate '" +
                                        std::string(tokens[k + 1]) + "'");
        }
        c[k] = *v;
      }
      for (double x : c) {
        if (std::abs(x) > render::kSceneBound) {
          throw BoundsError("line " + std::to_string(line_no) +
                            ": vertex outside [-3, 3]^3");
        }
      }
      vertices.push_back({c[0], c[1], c[2]});
    } else if (kw == "f") {
      if (tokens.size() < 4) {
        throw ParseError(line_no, "face needs at least 3 vertices");
      }
      std::vector<int> idx;
      for (std::size_t k = 1; k < tokens.size(); ++k) {
        std::string_view tok = tokens[k];
        tok = tok.substr(0, tok.find('/'));
        auto v = parse_long(tok);
        if (!v || *v == 0) {
          throw ParseError(line_no,
                           "bad vertex index '" + std::string(tokens[k]) + "'");
        }
        const long n = static_cast<long>(vertices.size());
        const long resolved = *v > 0 ? *v - 1 : n + *v;
        if (resolved < 0 || resolved >= n) {
          throw ParseError(line_no, "vertex index " + std::to_string(*v) +
                                        " out of range");
        }
        idx.push_back(static_cast<int>(resolved));
      }
      if (objects.empty()) objects.push_back({});
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
        objects.back().triangles.push_back({idx[0], idx[k], idx[k + 1]});
      }
    } else if (kw == "o") {
      saw_object = true;
      objects.push_back({tokens.size() > 1 ? std::string(tokens[1]) : "", {}});
    } else if (kw == "vt" || kw == "vn" || kw == "vp" || kw == "g" ||
               kw == "s" || kw == "l" || kw == "mtllib" || kw == "usemtl") {
      continue;
    } else {
      throw ParseError(line_no, "unknown record '" + std::string(kw) + "'");
    }
  }

  Scene scene;
  scene.id = id.empty() ? content_scene_id(text) : id;
  scene.source = scenegen::ImportedSource{filename};
  auto add = [&](TriangleMesh mesh) {
    SceneObject o;
    o.mesh = std::move(mesh);
    scene.objects.push_back(std::move(o));
  };
  if (saw_object) {
    for (const RawObject& raw : objects) {
      if (!raw.triangles.empty()) add(compact(vertices, raw.triangles));
    }
  } else if (!objects.empty()) {
    for (auto& part : connected_components(compact(vertices, objects[0].triangles))) {
      add(std::move(part));
    }
  }
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    if (!is_watertight(scene.objects[i].mesh)) {
      scene.warnings.push_back("object " + std::to_string(i) +
                               " is not a closed manifold mesh");
    }
  }
  scene.user_params.num_objects = static_cast<int>(scene.objects.size());
  if (!scene.objects.empty()) {
    scene.user_params.layout = scenegen::classify_layout(scene.objects, {});
  }
  return scene;
}

}  // namespace polyscene::dataset
