// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Data-only broadcast bus and chiplet bridge.
//
// The wire carries only values; a receiver knows the sender from the slot
// position. Slots are ordered by ascending node id and every epoch is one
// global round. The simulator keeps the source id in each event so it can
// model sparse occupancy, but all ordering rules follow the slot schedule.

#include <cstddef>
#include <span>
#include <vector>

#include "nvtwin/config.hpp"
#include "nvtwin/core_model.hpp"

namespace nvtwin {

struct BroadcastEvent {
  NodeId source;
  Word value{0};

  friend bool operator==(const BroadcastEvent&, const BroadcastEvent&) = default;
};

/// Strictly ascending by source: each slot used at most once, in schedule order.
bool is_slot_ordered(std::span<const BroadcastEvent> stream) noexcept;

/// Throws ContractError unless `stream` is slot ordered.
void check_slot_order(std::span<const BroadcastEvent> stream);

/// Local target address matching: the (value, weight) pairs for every event
/// whose source is in `table`, in table order. Sources missing from the stream
/// contribute nothing. Throws ContractError on an unordered stream.
std::vector<MatchedInput> match(const AddressTable& table, std::span<const BroadcastEvent> stream);

/// Receiver-side gather used by the simulator. Writes one input per table
/// entry into `out` (resized to table.size()); entries whose source did not
/// broadcast get value 0, which is what a silent sparse slot means.
/// Returns the number of entries actually matched on the bus.
/// `stream` must already be slot ordered.
std::size_t gather_inputs(const AddressTable& table, std::span<const BroadcastEvent> stream,
                          std::vector<MatchedInput>& out);

/// Merges a chip's local stream with the stream forwarded by its neighbour.
/// Throws ContractError if either input is unordered and ProtocolError if
/// both claim the same slot.
std::vector<BroadcastEvent> merge_streams(std::span<const BroadcastEvent> local,
                                          std::span<const BroadcastEvent> forwarded);

/// One chiplet's slice of the global address space, [low, high).
struct ChipBridge {
  std::size_t chip_index{0};
  std::size_t low{0};
  std::size_t high{0};

  std::size_t size() const noexcept { return high - low; }
  bool contains(NodeId id) const noexcept { return id.index() >= low && id.index() < high; }

  friend bool operator==(const ChipBridge&, const ChipBridge&) = default;
};

/// Contiguous partition of [0, total_nodes) into ceil(total/nodes_per_chip)
/// chips. Throws AddressSpaceExceeded past 65536 nodes, ConfigError for a zero
/// chip size or (when enforced) more than kMaxChips chips.
std::vector<ChipBridge> plan_chips(std::size_t total_nodes, std::size_t nodes_per_chip,
                                   bool enforce_chip_limit = true);

/// Index into `plan` of the chip owning `id`. Throws ContractError if none.
std::size_t chip_of(std::span<const ChipBridge> plan, NodeId id);

/// Builds the chip-local broadcast stream from last epoch's outputs.
void emit_local_stream(const ChipBridge& chip, std::span<const Word> outputs, SlotMode mode,
                       std::vector<BroadcastEvent>& out);

}  // namespace nvtwin
