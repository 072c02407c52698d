// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include "nvtwin/interconnect.hpp"

#include <algorithm>
#include <string>

#include "nvtwin/errors.hpp"

namespace nvtwin {

bool is_slot_ordered(std::span<const BroadcastEvent> stream) noexcept {
  for (std::size_t i = 1; i < stream.size(); ++i) {
    if (!(stream[i - 1].source < stream[i].source)) return false;
  }
  return true;
}

void check_slot_order(std::span<const BroadcastEvent> stream) {
  if (!is_slot_ordered(stream)) {
    throw ContractError("broadcast stream is not in ascending slot order");
  }
}

namespace {

// Forward merge-scan of a sorted table against a sorted stream; the stream
// cursor only ever advances. `on_entry` sees each table entry with the
// matching event or nullptr.
template <typename OnEntry>
void scan(const AddressTable& table, std::span<const BroadcastEvent> stream, OnEntry&& on_entry) {
  auto cursor = stream.begin();
  const auto end = stream.end();
  for (const auto& entry : table.entries()) {
    cursor = std::lower_bound(cursor, end, entry.source,
                              [](const BroadcastEvent& e, NodeId id) { return e.source < id; });
    if (cursor != end && cursor->source == entry.source) {
      on_entry(entry, &*cursor);
    } else {
      on_entry(entry, nullptr);
    }
  }
}

}  // namespace

std::vector<MatchedInput> match(const AddressTable& table, std::span<const BroadcastEvent> stream) {
  check_slot_order(stream);
  std::vector<MatchedInput> out;
  out.reserve(std::min(table.size(), stream.size()));
  scan(table, stream, [&](const ConnectionEntry& entry, const BroadcastEvent* ev) {
    if (ev != nullptr) out.push_back({ev->value, entry.weight});
  });
  return out;
}

std::size_t gather_inputs(const AddressTable& table, std::span<const BroadcastEvent> stream,
                          std::vector<MatchedInput>& out) {
  out.clear();
  out.reserve(table.size());
  std::size_t hits = 0;
  scan(table, stream, [&](const ConnectionEntry& entry, const BroadcastEvent* ev) {
    if (ev != nullptr) {
      ++hits;
      out.push_back({ev->value, entry.weight});
    } else {
      out.push_back({Word{0}, entry.weight});
    }
  });
  return hits;
}

std::vector<BroadcastEvent> merge_streams(std::span<const BroadcastEvent> local,
                                          std::span<const BroadcastEvent> forwarded) {
  check_slot_order(local);
  check_slot_order(forwarded);

  std::vector<BroadcastEvent> out;
  out.reserve(local.size() + forwarded.size());
  auto a = local.begin();
  auto b = forwarded.begin();
  while (a != local.end() && b != forwarded.end()) {
    if (a->source == b->source) {
      throw ProtocolError("slot " + std::to_string(a->source.index()) +
                          " claimed by both the local and the forwarded stream");
    }
    if (a->source < b->source) {
      out.push_back(*a++);
    } else {
      out.push_back(*b++);
    }
  }
  out.insert(out.end(), a, local.end());
  out.insert(out.end(), b, forwarded.end());
  return out;
}

std::vector<ChipBridge> plan_chips(std::size_t total_nodes, std::size_t nodes_per_chip,
                                   bool enforce_chip_limit) {
  if (total_nodes > kAddressSpace) {
    throw AddressSpaceExceeded("total_nodes " + std::to_string(total_nodes) +
                               " exceeds the 65536-node address space");
  }
  if (nodes_per_chip == 0) throw ConfigError("nodes_per_chip must be >= 1");

  const std::size_t chips = (total_nodes + nodes_per_chip - 1) / nodes_per_chip;
  if (enforce_chip_limit && chips > kMaxChips) {
    throw ConfigError(std::to_string(chips) + " chips exceed the limit of " +
                      std::to_string(kMaxChips));
  }

  std::vector<ChipBridge> plan;
  plan.reserve(chips);
  for (std::size_t c = 0; c < chips; ++c) {
    const std::size_t low = c * nodes_per_chip;
    plan.push_back({c, low, std::min(total_nodes, low + nodes_per_chip)});
  }
  return plan;
}

std::size_t chip_of(std::span<const ChipBridge> plan, NodeId id) {
  auto it = std::upper_bound(plan.begin(), plan.end(), id.index(),
                             [](std::size_t v, const ChipBridge& c) { return v < c.high; });
  if (it == plan.end() || !it->contains(id)) {
    throw ContractError("node " + std::to_string(id.index()) + " is outside every chip");
  }
  return static_cast<std::size_t>(it - plan.begin());
}

void emit_local_stream(const ChipBridge& chip, std::span<const Word> outputs, SlotMode mode,
                       std::vector<BroadcastEvent>& out) {
  out.clear();
  if (mode == SlotMode::Dense) out.reserve(chip.size());
  for (std::size_t k = chip.low; k < chip.high; ++k) {
    const Word v = outputs[k];
    if (mode == SlotMode::Dense || v != 0) {
      out.push_back({NodeId(static_cast<std::uint16_t>(k)), v});
    }
  }
}

}  // namespace nvtwin
