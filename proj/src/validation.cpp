// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include "nvtwin/validation.hpp"

#include <algorithm>
#include <string>

namespace nvtwin {

std::string_view violation_name(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::IdOutOfRange: return "IdOutOfRange";
    case ViolationKind::FanInExceeded: return "FanInExceeded";
    case ViolationKind::ArityMismatch: return "ArityMismatch";
    case ViolationKind::DuplicateSource: return "DuplicateSource";
    case ViolationKind::SourceOutOfRange: return "SourceOutOfRange";
    case ViolationKind::DuplicateNodeId: return "DuplicateNodeId";
  }
  return "Unknown";
}

std::vector<Violation> validate_program(const NodeProgram& p, const SystemConfig& cfg) {
  std::vector<Violation> out;
  const std::size_t n = p.table.size();

  if (p.id.index() >= cfg.total_nodes) {
    out.push_back({ViolationKind::IdOutOfRange, p.id,
                   "id " + std::to_string(p.id.index()) + " >= total_nodes " +
                       std::to_string(cfg.total_nodes)});
  }
  if (n > kMaxFanIn) {
    out.push_back({ViolationKind::FanInExceeded, p.id,
                   std::to_string(n) + " table entries, limit " + std::to_string(kMaxFanIn)});
  } else if (!arity(p.opcode).accepts(n)) {
    const Arity a = arity(p.opcode);
    out.push_back({ViolationKind::ArityMismatch, p.id,
                   std::string(opcode_name(p.opcode)) + " takes " + std::to_string(a.min) +
                       ".." + std::to_string(a.max) + " inputs, table has " + std::to_string(n)});
  }
  if (p.table.has_duplicate_sources()) {
    out.push_back({ViolationKind::DuplicateSource, p.id, "table lists a source more than once"});
  }
  const auto entries = p.table.entries();
  if (!entries.empty() && entries.back().source.index() >= cfg.total_nodes) {
    out.push_back({ViolationKind::SourceOutOfRange, p.id,
                   "source " + std::to_string(entries.back().source.index()) +
                       " >= total_nodes " + std::to_string(cfg.total_nodes)});
  }
  return out;
}

std::vector<Violation> validate_system(std::span<const NodeProgram> programs,
                                       const SystemConfig& cfg) {
  std::vector<Violation> out;
  for (const auto& p : programs) {
    auto v = validate_program(p, cfg);
    out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }

  std::vector<NodeId> ids;
  ids.reserve(programs.size());
  for (const auto& p : programs) ids.push_back(p.id);
  std::sort(ids.begin(), ids.end());
  for (std::size_t i = 1; i < ids.size(); ++i) {
    if (ids[i] == ids[i - 1] && (i == 1 || ids[i - 2] != ids[i])) {
      out.push_back({ViolationKind::DuplicateNodeId, ids[i],
                     "node id " + std::to_string(ids[i].index()) + " is programmed twice"});
    }
  }
  return out;
}

std::string format_violation(const Violation& v) {
  return "node " + std::to_string(v.node.index()) + ": " + std::string(violation_name(v.kind)) +
         " (" + v.detail + ")";
}

}  // namespace nvtwin
