// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Epoch-synchronous execution engine.
//
// Epoch numbering: epoch 0 is the boot state, where CONST nodes already
// drive their parameter and every other node outputs 0. Epoch e >= 1 reads
// only the outputs of epoch e-1 and writes a fresh output buffer, so a value
// needs exactly one epoch per table hop. Host inputs scheduled for epoch e
// overwrite CONST registers before epoch e is computed; the new word is on
// the bus from epoch e+1.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "nvtwin/config.hpp"
#include "nvtwin/core_model.hpp"
#include "nvtwin/interconnect.hpp"
#include "nvtwin/perfmodel.hpp"

namespace nvtwin {

/// Whole-chip current line plus supply voltage used for energy estimates.
/// The 0.9 V default is an assumption for the 28 nm class, not a measurement.
struct CurrentModel {
  CurrentCondition condition{CurrentCondition::DinVss};
  double supply_v{0.9};
  /// Relative current per opcode; the mix of executed ops scales I(f).
  std::array<double, kOpcodeCount> opcode_weights{1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
};

/// Mergeable counters; operator+= is associative and commutative.
struct EpochStats {
  std::size_t epochs{0};
  std::size_t broadcasts{0};
  std::size_t matches{0};
  /// One 24-bit SRAM read per matched entry.
  std::size_t sram_reads{0};
  /// Events carried across chip-to-chip bridges.
  std::size_t bridge_transfers{0};
  /// Node slots observed (nodes x epochs); denominator of firing_fraction.
  std::size_t slots{0};
  std::size_t firing{0};
  std::array<std::size_t, kOpcodeCount> ops_by_opcode{};
  double energy_mj{0.0};

  double firing_fraction() const noexcept;
  std::size_t ops(Opcode op) const noexcept { return ops_by_opcode[static_cast<std::size_t>(op)]; }
  EpochStats& operator+=(const EpochStats& other) noexcept;

  friend bool operator==(const EpochStats&, const EpochStats&) = default;
};

/// Validated programs bound to a geometry. Immutable once built.
class SystemImage {
 public:
  /// Throws ConfigError listing every violation when programs are invalid.
  SystemImage(std::vector<NodeProgram> programs, SystemConfig cfg);

  const SystemConfig& config() const noexcept { return cfg_; }
  std::span<const NodeProgram> programs() const noexcept { return programs_; }
  std::span<const ChipBridge> chips() const noexcept { return chips_; }
  const NodeProgram* find(NodeId id) const noexcept;

  /// CONST nodes; the host may overwrite their parameter each epoch.
  std::span<const NodeId> input_ids() const noexcept { return input_ids_; }
  /// Nodes flagged for host readout, ascending.
  std::span<const NodeId> output_ids() const noexcept { return output_ids_; }
  bool is_input(NodeId id) const noexcept;

 private:
  SystemConfig cfg_;
  std::vector<NodeProgram> programs_;
  std::vector<ChipBridge> chips_;
  std::vector<std::int32_t> program_of_;
  std::vector<NodeId> input_ids_;
  std::vector<NodeId> output_ids_;
};

using HostInputs = std::map<NodeId, Word>;

struct EpochState {
  /// Outputs of the last completed epoch.
  std::vector<Word> prev;
  /// Scratch buffer written during the current epoch.
  std::vector<Word> next;
  /// CONST parameter registers (host-writable).
  std::vector<Word> registers;
  std::size_t epoch_index{0};
};

EpochState boot_state(const SystemImage& image);

/// Applies host writes to CONST registers. Throws HostIoError for ids that
/// are not input nodes. Writes at epoch 0 also update the boot outputs.
void apply_host_inputs(const SystemImage& image, EpochState& state, const HostInputs& inputs);

/// Forces a node's current output word (used to seed rings and similar).
/// Throws HostIoError for ids outside the array.
void preload(const SystemImage& image, EpochState& state, NodeId id, Word value);

/// Runs one full epoch and swaps buffers. `inputs` are the host writes for
/// this epoch; they land in the CONST registers before evaluation.
EpochStats step_epoch(const SystemImage& image, EpochState& state, const HostInputs& inputs = {},
                      const CurrentModel& current = {});

/// Estimated energy in mJ: chips * I(f) * V * (epochs * slots / clock).
/// Sparse epochs idle unused slots, so slots is always total_nodes.
double estimate_energy(const EpochStats& stats, const SystemConfig& cfg, const CurrentModel& current);

class InputSchedule {
 public:
  void add(std::size_t epoch, NodeId id, Word value) { by_epoch_[epoch][id] = value; }
  const HostInputs& at(std::size_t epoch) const;
  bool empty() const noexcept { return by_epoch_.empty(); }
  /// True if any write is scheduled strictly after `epoch`.
  bool has_after(std::size_t epoch) const noexcept;
  const std::map<std::size_t, HostInputs>& entries() const noexcept { return by_epoch_; }

 private:
  std::map<std::size_t, HostInputs> by_epoch_;
};

struct RunOptions {
  /// Stop once an epoch reproduces its predecessor and no host writes remain.
  bool stop_at_fixed_point{false};
  CurrentModel current{};
  std::vector<std::pair<NodeId, Word>> preload{};
};

struct TraceRow {
  std::size_t epoch;
  NodeId node;
  Word value;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct RunResult {
  std::vector<TraceRow> trace;
  std::vector<EpochStats> per_epoch;
  EpochStats total;
  std::size_t epochs_run{0};
  bool reached_fixed_point{false};
  /// Outputs of every node after the last epoch.
  std::vector<Word> final_outputs;
};

/// Runs epochs 1..cfg.max_epochs and reads out every output node each epoch.
RunResult run(const SystemImage& image, const InputSchedule& schedule, const RunOptions& options = {});
RunResult run(std::vector<NodeProgram> programs, const SystemConfig& cfg,
              const InputSchedule& schedule, const RunOptions& options = {});

/// `epoch,node_id,value` rows.
void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace);
/// One CSV row per epoch, then a `total` row.
void write_stats_csv(std::ostream& os, std::span<const EpochStats> per_epoch, const EpochStats& total);
void write_stats_summary(std::ostream& os, const RunResult& result, const SystemConfig& cfg);

/// Parses `epoch,node_id,value` host input rows. Throws ConfigError.
InputSchedule parse_input_schedule(std::string_view csv_text);

}  // namespace nvtwin
