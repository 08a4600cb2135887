// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "polyscene/render.h"

namespace polyscene::render {

/// RGB8 PNG with fixed compression settings, so equal images encode to
/// equal bytes.
std::vector<std::uint8_t> encode_png(const Image& image);

/// Decodes any PNG libpng understands into RGB8 (alpha is dropped, palettes
/// and grayscale expanded). Throws ParseError on malformed data.
Image decode_png(std::span<const std::uint8_t> bytes);

}  // namespace polyscene::render
