// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Per-chip boot image, little-endian:
//
//   "NV1B" | version u16 | chip_index u16 | node_count u16
//   node_count x ( id u16 | opcode u8 | flags u8 | param s16 | table_len u16
//                  | table_len x ( source u16 | weight s8 ) )
//
// flags bit 0 is the output flag; the other bits must be zero. Nodes are
// written in ascending id order and each table in ascending source order;
// the decoder rejects anything else so every accepted image is canonical.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nvtwin/core_model.hpp"
#include "nvtwin/interconnect.hpp"

namespace nvtwin {

inline constexpr std::array<std::uint8_t, 4> kBootMagic{'N', 'V', '1', 'B'};
inline constexpr std::uint16_t kBootVersion = 1;
inline constexpr std::size_t kBootHeaderBytes = 10;

struct BootImage {
  std::uint16_t chip_index{0};
  std::vector<NodeProgram> programs;

  friend bool operator==(const BootImage&, const BootImage&) = default;
};

/// Throws BootImageError for tables over kMaxFanIn, duplicate ids or
/// duplicate sources, or more than 65535 nodes.
std::vector<std::uint8_t> encode_boot_image(const BootImage& image);

/// One image per chip in `plan`. Throws BootImageError if a program's id
/// falls outside every chip range.
std::vector<std::vector<std::uint8_t>> encode_boot_images(std::span<const NodeProgram> programs,
                                                          std::span<const ChipBridge> plan);

/// Throws BootImageError on truncation, bad magic, unknown version, unknown
/// opcode, reserved flag bits, table_len > 256, non-ascending ids or sources,
/// and trailing bytes.
BootImage decode_boot_image(std::span<const std::uint8_t> bytes);

/// True if `bytes` starts with the boot magic.
bool looks_like_boot_image(std::span<const std::uint8_t> bytes) noexcept;

}  // namespace nvtwin
