// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Line-based netlist format.
//
//   # comment
//   node <id|auto> <OPCODE> [param=<int>] [output] [name=<label>]
//   in <target> <- <src>:<weight> [<src>:<weight> ...]
//
// Targets and sources are node ids or labels. Targets and labels must be
// declared; a numeric source may name an undeclared id, which reads as an
// unprogrammed node (always 0). `in` lines for the same
// target accumulate and may appear before the node they refer to. `auto`
// ids take the lowest ids no explicit declaration uses, in document order.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nvtwin/core_model.hpp"
#include "nvtwin/errors.hpp"

namespace nvtwin {

struct SourceLocation {
  std::size_t line{0};
  std::size_t column{0};
};

enum class NetlistErrorKind {
  Syntax,
  UnknownOpcode,
  UnresolvedReference,
  DuplicateId,
  DuplicateSource,
  WeightOutOfRange,
  ParamOutOfRange,
  FanInExceeded,
  IdOutOfRange,
};

std::string_view netlist_error_name(NetlistErrorKind kind) noexcept;

class NetlistError : public Error {
 public:
  NetlistError(NetlistErrorKind kind, SourceLocation where, const std::string& message);

  NetlistErrorKind kind() const noexcept { return kind_; }
  SourceLocation where() const noexcept { return where_; }

 private:
  NetlistErrorKind kind_;
  SourceLocation where_;
};

struct NetlistNode {
  NodeId id;
  Opcode opcode{Opcode::Pass};
  std::int16_t param{0};
  bool is_output{false};
  std::string name;
  SourceLocation where;
  /// Resolved inbound connections, in declaration order.
  std::vector<ConnectionEntry> inputs;
};

struct NetlistDoc {
  /// Sorted by id.
  std::vector<NetlistNode> nodes;
};

NetlistDoc parse_netlist(std::string_view text);

std::vector<NodeProgram> to_programs(const NetlistDoc& doc);
NetlistDoc from_programs(std::span<const NodeProgram> programs);

/// Canonical text: nodes by id, one `in` line per node with sources ascending.
/// Labels are not emitted; every reference is a numeric id.
std::string emit_netlist(const NetlistDoc& doc);
std::string emit_netlist(std::span<const NodeProgram> programs);

}  // namespace nvtwin
