// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

#include "polyscene/scenegen.h"

namespace polyscene::dataset {

/// Wavefront OBJ text: header comments, then per object an `o` record,
/// its referenced vertices (6 decimals) and 1-based triangle faces.
std::string export_obj(const scenegen::Scene& scene);

/// Parses v, f and o records; vt, vn, g, s, l, mtllib and usemtl are
/// ignored. Polygons are fan-triangulated; negative and slash-separated
/// indices are accepted. Without `o` records, objects are the connected
/// components of the mesh.
///
/// Throws ParseError for malformed records and BoundsError for vertices
/// outside [-kSceneBound, kSceneBound]^3. Open meshes add a warning.
scenegen::Scene import_obj(std::string_view text,
                           const std::string& filename = "");

/// Identifier derived from file contents, used when a file carries none.
std::string content_scene_id(std::string_view bytes);

}  // namespace polyscene::dataset
