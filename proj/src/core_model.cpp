// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include "nvtwin/core_model.hpp"

#include <algorithm>
#include <iterator>
#include <limits>
#include <string>

#include "nvtwin/errors.hpp"

namespace nvtwin {

NodeId NodeId::from_index(std::size_t index) {
  if (index >= kAddressSpace) {
    throw AddressSpaceExceeded("node index " + std::to_string(index) +
                               " does not fit the 16-bit address space");
  }
  return NodeId(static_cast<std::uint16_t>(index));
}

namespace {

bool by_source(const ConnectionEntry& a, const ConnectionEntry& b) { return a.source < b.source; }

}  // namespace

AddressTable::AddressTable(std::vector<ConnectionEntry> entries) : entries_(std::move(entries)) {
  std::stable_sort(entries_.begin(), entries_.end(), by_source);
}

void AddressTable::add(ConnectionEntry entry) {
  auto pos = std::upper_bound(entries_.begin(), entries_.end(), entry, by_source);
  entries_.insert(pos, entry);
}

bool AddressTable::has_duplicate_sources() const noexcept {
  return std::adjacent_find(entries_.begin(), entries_.end(),
                            [](const ConnectionEntry& a, const ConnectionEntry& b) {
                              return a.source == b.source;
                            }) != entries_.end();
}

bool AddressTable::contains(NodeId source) const noexcept {
  return std::binary_search(entries_.begin(), entries_.end(), ConnectionEntry{source, 0},
                            by_source);
}

namespace {

constexpr std::array<std::string_view, kOpcodeCount> kOpcodeNames{
    "PASS", "ACC", "THRESH", "MAX", "MIN", "AND", "OR", "XOR", "NOT", "CONST"};

}  // namespace

std::string_view opcode_name(Opcode op) noexcept {
  return kOpcodeNames[static_cast<std::size_t>(op)];
}

std::optional<Opcode> parse_opcode(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kOpcodeNames.size(); ++i) {
    if (kOpcodeNames[i] == name) return static_cast<Opcode>(i);
  }
  return std::nullopt;
}

std::optional<Opcode> opcode_from_byte(std::uint8_t raw) noexcept {
  if (raw >= kOpcodeCount) return std::nullopt;
  return static_cast<Opcode>(raw);
}

Arity arity(Opcode op) noexcept {
  switch (op) {
    case Opcode::Pass:
    case Opcode::Not:
      return {1, 1};
    case Opcode::Const:
      return {0, 0};
    default:
      return {1, kMaxFanIn};
  }
}

bool is_bitwise(Opcode op) noexcept {
  return op == Opcode::And || op == Opcode::Or || op == Opcode::Xor || op == Opcode::Not;
}

Word saturate_to_word(std::int32_t acc) noexcept {
  constexpr std::int32_t lo = std::numeric_limits<Word>::min();
  constexpr std::int32_t hi = std::numeric_limits<Word>::max();
  return static_cast<Word>(std::clamp(acc, lo, hi));
}

std::int32_t weighted_sum(std::span<const MatchedInput> inputs) noexcept {
  constexpr std::int64_t lo = std::numeric_limits<std::int32_t>::min();
  constexpr std::int64_t hi = std::numeric_limits<std::int32_t>::max();
  std::int32_t acc = 0;
  for (const auto& in : inputs) {
    // Saturating add; with <= 256 inputs the bound is never reached, but the
    // accumulator width is part of the datapath contract.
    const std::int64_t wide = static_cast<std::int64_t>(acc) +
                              static_cast<std::int64_t>(in.value) * static_cast<std::int64_t>(in.weight);
    acc = static_cast<std::int32_t>(std::clamp(wide, lo, hi));
  }
  return acc;
}

Word eval_node(const NodeProgram& program, std::span<const MatchedInput> inputs) {
  const Arity a = arity(program.opcode);
  if (!a.accepts(inputs.size())) {
    throw ContractError(std::string(opcode_name(program.opcode)) + " node " +
                        std::to_string(program.id.index()) + " got " +
                        std::to_string(inputs.size()) + " inputs");
  }

  switch (program.opcode) {
    case Opcode::Pass:
      return inputs.front().value;
    case Opcode::Acc:
      return saturate_to_word(weighted_sum(inputs));
    case Opcode::Thresh:
      return saturate_to_word(weighted_sum(inputs)) >= program.param ? Word{1} : Word{0};
    case Opcode::Max:
      return std::max_element(inputs.begin(), inputs.end(),
                              [](auto& x, auto& y) { return x.value < y.value; })
          ->value;
    case Opcode::Min:
      return std::min_element(inputs.begin(), inputs.end(),
                              [](auto& x, auto& y) { return x.value < y.value; })
          ->value;
    case Opcode::And: {
      std::uint16_t r = 0xFFFF;
      for (const auto& in : inputs) r &= static_cast<std::uint16_t>(in.value);
      return static_cast<Word>(r);
    }
    case Opcode::Or: {
      std::uint16_t r = 0;
      for (const auto& in : inputs) r |= static_cast<std::uint16_t>(in.value);
      return static_cast<Word>(r);
    }
    case Opcode::Xor: {
      std::uint16_t r = 0;
      for (const auto& in : inputs) r ^= static_cast<std::uint16_t>(in.value);
      return static_cast<Word>(r);
    }
    case Opcode::Not:
      return static_cast<Word>(~static_cast<std::uint16_t>(inputs.front().value));
    case Opcode::Const:
      return program.param;
  }
  throw ContractError("unknown opcode");
}

}  // namespace nvtwin
