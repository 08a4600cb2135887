// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace polyscene::dataset {

struct ZipEntry {
  std::string name;
  std::vector<std::uint8_t> data;

  friend bool operator==(const ZipEntry&, const ZipEntry&) = default;
};

/// Uncompressed (stored) archive. Entries are written sorted by name with a
/// fixed 1980-01-01 timestamp, so equal inputs give equal bytes.
std::vector<std::uint8_t> write_zip(std::vector<ZipEntry> entries);

/// Reads stored entries in central-directory order. Throws ParseError on
/// malformed archives, compressed entries or CRC mismatches.
std::vector<ZipEntry> read_zip(std::span<const std::uint8_t> bytes);

}  // namespace polyscene::dataset
