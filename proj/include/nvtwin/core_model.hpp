// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nvtwin {

inline constexpr std::size_t kMaxFanIn = 256;
inline constexpr std::size_t kAddressSpace = 65536;
inline constexpr std::size_t kDefaultNodesPerChip = 3200;
inline constexpr std::size_t kMaxChips = 21;

/// A node's epoch output on the 16-bit datapath.
using Word = std::int16_t;
/// Per-connection weight stored next to the source address in node SRAM.
using Weight = std::int8_t;

/// Global node address across every chiplet in the array.
struct NodeId {
  std::uint16_t value{0};

  constexpr NodeId() = default;
  constexpr explicit NodeId(std::uint16_t v) : value(v) {}

  /// Throws AddressSpaceExceeded when `index` does not fit the 16-bit space.
  static NodeId from_index(std::size_t index);

  constexpr std::size_t index() const noexcept { return value; }

  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

/// One SRAM row: 16-bit source address plus 8-bit weight (24 bits on disk).
struct ConnectionEntry {
  NodeId source;
  Weight weight{1};

  friend bool operator==(const ConnectionEntry&, const ConnectionEntry&) = default;
};

/// Boot-loaded inbound connection list of a node, kept sorted by source.
///
/// The container accepts any number of entries (including duplicates) so
/// that validate_program can report fan-in and duplicate violations as data.
/// A table that passes validation holds at most kMaxFanIn unique sources.
class AddressTable {
 public:
  AddressTable() = default;
  explicit AddressTable(std::vector<ConnectionEntry> entries);

  /// Inserts after any entries with the same source.
  void add(ConnectionEntry entry);

  std::span<const ConnectionEntry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  bool has_duplicate_sources() const noexcept;
  bool contains(NodeId source) const noexcept;

  friend bool operator==(const AddressTable&, const AddressTable&) = default;

 private:
  std::vector<ConnectionEntry> entries_;
};

enum class Opcode : std::uint8_t {
  Pass = 0,
  Acc,
  Thresh,
  Max,
  Min,
  And,
  Or,
  Xor,
  Not,
  Const,
};

inline constexpr std::size_t kOpcodeCount = 10;
inline constexpr std::array<Opcode, kOpcodeCount> kAllOpcodes{
    Opcode::Pass, Opcode::Acc, Opcode::Thresh, Opcode::Max, Opcode::Min,
    Opcode::And,  Opcode::Or,  Opcode::Xor,    Opcode::Not, Opcode::Const};

std::string_view opcode_name(Opcode op) noexcept;
std::optional<Opcode> parse_opcode(std::string_view name) noexcept;
std::optional<Opcode> opcode_from_byte(std::uint8_t raw) noexcept;

struct Arity {
  std::size_t min;
  std::size_t max;
  bool accepts(std::size_t n) const noexcept { return n >= min && n <= max; }
};

Arity arity(Opcode op) noexcept;
/// AND/OR/XOR/NOT operate bitwise and ignore weights.
bool is_bitwise(Opcode op) noexcept;

struct NodeProgram {
  NodeId id;
  Opcode opcode{Opcode::Pass};
  /// Threshold for THRESH, constant for CONST, ignored otherwise.
  std::int16_t param{0};
  AddressTable table;
  bool is_output{false};

  friend bool operator==(const NodeProgram&, const NodeProgram&) = default;
};

/// A matched (value, weight) pair handed from the message handler to the IPU.
struct MatchedInput {
  Word value{0};
  Weight weight{0};

  friend bool operator==(const MatchedInput&, const MatchedInput&) = default;
};

/// Clamps a 32-bit accumulator onto the 16-bit output word.
Word saturate_to_word(std::int32_t acc) noexcept;

/// Saturating weighted sum over a 32-bit accumulator (not yet narrowed).
std::int32_t weighted_sum(std::span<const MatchedInput> inputs) noexcept;

/// Evaluates one node's instruction over this epoch's matched inputs.
/// Throws ContractError when `inputs.size()` violates the opcode's arity.
Word eval_node(const NodeProgram& program, std::span<const MatchedInput> inputs);

}  // namespace nvtwin
