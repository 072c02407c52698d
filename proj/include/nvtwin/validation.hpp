// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nvtwin/config.hpp"
#include "nvtwin/core_model.hpp"

namespace nvtwin {

enum class ViolationKind {
  IdOutOfRange,
  FanInExceeded,
  ArityMismatch,
  DuplicateSource,
  SourceOutOfRange,
  DuplicateNodeId,
};

std::string_view violation_name(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  NodeId node;
  std::string detail;
};

/// Every architectural limit `program` breaks, in a fixed order:
/// id range, fan-in, arity, duplicate sources, then out-of-range sources.
std::vector<Violation> validate_program(const NodeProgram& program, const SystemConfig& cfg);

/// validate_program over each node plus system-wide checks (duplicate ids).
std::vector<Violation> validate_system(std::span<const NodeProgram> programs,
                                       const SystemConfig& cfg);

std::string format_violation(const Violation& v);

}  // namespace nvtwin
