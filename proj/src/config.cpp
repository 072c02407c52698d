// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include "nvtwin/config.hpp"

#include <string>

#include "nvtwin/errors.hpp"

namespace nvtwin {

std::string_view slot_mode_name(SlotMode mode) noexcept {
  return mode == SlotMode::Dense ? "dense" : "sparse";
}

std::optional<SlotMode> parse_slot_mode(std::string_view name) noexcept {
  if (name == "dense" || name == "DENSE") return SlotMode::Dense;
  if (name == "sparse" || name == "SPARSE") return SlotMode::Sparse;
  return std::nullopt;
}

std::size_t SystemConfig::chips() const noexcept {
  if (nodes_per_chip == 0) return 0;
  return (total_nodes + nodes_per_chip - 1) / nodes_per_chip;
}

void check_config(const SystemConfig& cfg) {
  if (cfg.total_nodes > kAddressSpace) {
    throw AddressSpaceExceeded("total_nodes " + std::to_string(cfg.total_nodes) +
                               " exceeds the 65536-node address space");
  }
  if (cfg.nodes_per_chip == 0) throw ConfigError("nodes_per_chip must be >= 1");
  if (!(cfg.clock_hz > 0.0)) throw ConfigError("clock_hz must be > 0");
  if (cfg.threads == 0) throw ConfigError("threads must be >= 1");
  if (cfg.enforce_chip_limit && cfg.chips() > kMaxChips) {
    throw ConfigError(std::to_string(cfg.chips()) + " chips exceed the limit of " +
                      std::to_string(kMaxChips));
  }
}

}  // namespace nvtwin
