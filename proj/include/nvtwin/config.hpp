// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "nvtwin/core_model.hpp"

namespace nvtwin {

enum class SlotMode {
  /// Every node owns a slot every epoch; slot k carries node k's output.
  Dense,
  /// Only firing (nonzero) nodes emit; ascending slot order is kept.
  Sparse,
};

std::string_view slot_mode_name(SlotMode mode) noexcept;
std::optional<SlotMode> parse_slot_mode(std::string_view name) noexcept;

/// Array geometry and run-level knobs.
struct SystemConfig {
  std::size_t total_nodes{kDefaultNodesPerChip};
  std::size_t nodes_per_chip{kDefaultNodesPerChip};
  double clock_hz{50e6};
  SlotMode mode{SlotMode::Dense};
  std::size_t max_epochs{1};
  /// Reject arrays of more than kMaxChips chiplets.
  bool enforce_chip_limit{true};
  /// Worker threads for node evaluation inside an epoch.
  unsigned threads{1};

  std::size_t chips() const noexcept;
};

/// Throws AddressSpaceExceeded / ConfigError when the geometry is illegal.
void check_config(const SystemConfig& cfg);

}  // namespace nvtwin
