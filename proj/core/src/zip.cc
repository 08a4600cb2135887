// Copyright 2026 The Polyscene Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyscene/zip.h"

#include <zlib.h>

#include <algorithm>

#include "polyscene/errors.h"

namespace polyscene::dataset {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::uint16_t kVersion = 20;
constexpr std::uint16_t kDosTime = 0;
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01

void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back(v >> 8);
}

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

std::uint32_t crc_of(const std::vector<std::uint8_t>& data) {
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t done = 0;
  while (done < data.size()) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - done, 1u << 30));
    crc = crc32(crc, data.data() + done, chunk);
    done += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint16_t u16(std::size_t at) const {
    need(at, 2);
    return bytes_[at] | (bytes_[at + 1] << 8);
  }
  std::uint32_t u32(std::size_t at) const {
    need(at, 4);
    return static_cast<std::uint32_t>(u16(at)) |
           (static_cast<std::uint32_t>(u16(at + 2)) << 16);
  }
  void need(std::size_t at, std::size_t n) const {
    if (at > bytes_.size() || bytes_.size() - at < n) {
      throw ParseError(0, "truncated zip archive");
    }
  }
  std::span<const std::uint8_t> bytes() const { return bytes_; }

 private:
  std::span<const std::uint8_t> bytes_;
};

}  // namespace

std::vector<std::uint8_t> write_zip(std::vector<ZipEntry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const ZipEntry& a, const ZipEntry& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].name == entries[i - 1].name) {
      throw InvalidArgument("duplicate zip entry " + entries[i].name);
    }
  }
  if (entries.size() > 0xFFFF) throw InvalidArgument("too many zip entries");
  std::vector<std::uint8_t> out;
  std::vector<std::uint8_t> central;
  for (const ZipEntry& e : entries) {
    if (e.data.size() > 0xFFFFFFFEu || out.size() > 0xFFFFFFFEu) {
      throw InvalidArgument("zip entry too large: " + e.name);
    }
    const std::uint32_t offset = static_cast<std::uint32_t>(out.size());
    const std::uint32_t crc = crc_of(e.data);
    const auto size = static_cast<std::uint32_t>(e.data.size());
    const auto name_len = static_cast<std::uint16_t>(e.name.size());

    put32(out, kLocalSig);
    put16(out, kVersion);
    put16(out, 0);  // flags
    put16(out, 0);  // stored
    put16(out, kDosTime);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, size);
    put32(out, size);
    put16(out, name_len);
    put16(out, 0);
    out.insert(out.end(), e.name.begin(), e.name.end());
    out.insert(out.end(), e.data.begin(), e.data.end());

    put32(central, kCentralSig);
    put16(central, kVersion);
    put16(central, kVersion);
    put16(central, 0);
    put16(central, 0);
    put16(central, kDosTime);
    put16(central, kDosDate);
    put32(central, crc);
    put32(central, size);
    put32(central, size);
    put16(central, name_len);
    put16(central, 0);  // extra
    put16(central, 0);  // comment
    put16(central, 0);  // disk
    put16(central, 0);  // internal attributes
    put32(central, 0);  // external attributes
    put32(central, offset);
    central.insert(central.end(), e.name.begin(), e.name.end());
  }
  const auto central_offset = static_cast<std::uint32_t>(out.size());
  out.insert(out.end(), central.begin(), central.end());
  put32(out, kEndSig);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put16(out, static_cast<std::uint16_t>(entries.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, central_offset);
  put16(out, 0);
  return out;
}

std::vector<ZipEntry> read_zip(std::span<const std::uint8_t> bytes) {
  const Reader r(bytes);
  if (bytes.size() < 22) throw ParseError(0, "truncated zip archive");
  std::size_t eocd = bytes.size() - 22;
  while (r.u32(eocd) != kEndSig) {
    if (eocd == 0 || bytes.size() - eocd > 22 + 0xFFFF) {
      throw ParseError(0, "zip end record not found");
    }
    --eocd;
  }
  const std::uint16_t count = r.u16(eocd + 10);
  std::size_t at = r.u32(eocd + 16);
  std::vector<ZipEntry> out;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (r.u32(at) != kCentralSig) throw ParseError(0, "bad central directory");
    const std::uint16_t method = r.u16(at + 10);
    const std::uint32_t crc = r.u32(at + 16);
    const std::uint32_t size = r.u32(at + 20);
    const std::uint16_t name_len = r.u16(at + 28);
    const std::uint16_t extra_len = r.u16(at + 30);
    const std::uint16_t comment_len = r.u16(at + 32);
    const std::uint32_t local = r.u32(at + 42);
    r.need(at + 46, name_len);
    ZipEntry e;
    e.name.assign(bytes.begin() + at + 46, bytes.begin() + at + 46 + name_len);
    if (method != 0) throw ParseError(0, "compressed entry " + e.name);
    if (r.u32(local) != kLocalSig) throw ParseError(0, "bad local header");
    const std::size_t data_at = local + 30 + r.u16(local + 26) + r.u16(local + 28);
    r.need(data_at, size);
    e.data.assign(bytes.begin() + data_at, bytes.begin() + data_at + size);
    if (crc_of(e.data) != crc) throw ParseError(0, "CRC mismatch in " + e.name);
    out.push_back(std::move(e));
    at += 46 + name_len + extra_len + comment_len;
  }
  return out;
}

}  // namespace polyscene::dataset
