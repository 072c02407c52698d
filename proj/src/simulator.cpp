// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include "nvtwin/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <string>
#include <thread>

#include "nvtwin/csv.hpp"
#include "nvtwin/errors.hpp"
#include "nvtwin/validation.hpp"

namespace nvtwin {

double EpochStats::firing_fraction() const noexcept {
  return slots == 0 ? 0.0 : static_cast<double>(firing) / static_cast<double>(slots);
}

EpochStats& EpochStats::operator+=(const EpochStats& o) noexcept {
  epochs += o.epochs;
  broadcasts += o.broadcasts;
  matches += o.matches;
  sram_reads += o.sram_reads;
  bridge_transfers += o.bridge_transfers;
  slots += o.slots;
  firing += o.firing;
  for (std::size_t i = 0; i < kOpcodeCount; ++i) ops_by_opcode[i] += o.ops_by_opcode[i];
  energy_mj += o.energy_mj;
  return *this;
}

SystemImage::SystemImage(std::vector<NodeProgram> programs, SystemConfig cfg)
    : cfg_(cfg), programs_(std::move(programs)) {
  check_config(cfg_);
  const auto violations = validate_system(programs_, cfg_);
  if (!violations.empty()) {
    std::string msg = std::to_string(violations.size()) + " program violation(s):";
    const std::size_t shown = std::min<std::size_t>(violations.size(), 8);
    for (std::size_t i = 0; i < shown; ++i) msg += "\n  " + format_violation(violations[i]);
    if (shown < violations.size()) msg += "\n  ...";
    throw ConfigError(msg);
  }

  std::sort(programs_.begin(), programs_.end(),
            [](const NodeProgram& a, const NodeProgram& b) { return a.id < b.id; });
  chips_ = plan_chips(cfg_.total_nodes, cfg_.nodes_per_chip, cfg_.enforce_chip_limit);

  program_of_.assign(cfg_.total_nodes, -1);
  for (std::size_t i = 0; i < programs_.size(); ++i) {
    const auto& p = programs_[i];
    program_of_[p.id.index()] = static_cast<std::int32_t>(i);
    if (p.opcode == Opcode::Const) input_ids_.push_back(p.id);
    if (p.is_output) output_ids_.push_back(p.id);
  }
}

const NodeProgram* SystemImage::find(NodeId id) const noexcept {
  if (id.index() >= program_of_.size()) return nullptr;
  const auto i = program_of_[id.index()];
  return i < 0 ? nullptr : &programs_[static_cast<std::size_t>(i)];
}

bool SystemImage::is_input(NodeId id) const noexcept {
  const auto* p = find(id);
  return p != nullptr && p->opcode == Opcode::Const;
}

EpochState boot_state(const SystemImage& image) {
  const std::size_t n = image.config().total_nodes;
  EpochState s;
  s.prev.assign(n, 0);
  s.next.assign(n, 0);
  s.registers.assign(n, 0);
  for (const auto& p : image.programs()) {
    if (p.opcode == Opcode::Const) {
      s.registers[p.id.index()] = p.param;
      s.prev[p.id.index()] = p.param;
    }
  }
  return s;
}

namespace {

void write_registers(const SystemImage& image, EpochState& state, const HostInputs& inputs,
                     bool boot_outputs) {
  for (const auto& [id, value] : inputs) {
    if (!image.is_input(id)) {
      throw HostIoError("host input targets node " + std::to_string(id.index()) +
                        ", which is not a CONST input node");
    }
  }
  for (const auto& [id, value] : inputs) {
    state.registers[id.index()] = value;
    if (boot_outputs) state.prev[id.index()] = value;
  }
}

}  // namespace

void apply_host_inputs(const SystemImage& image, EpochState& state, const HostInputs& inputs) {
  write_registers(image, state, inputs, state.epoch_index == 0);
}

void preload(const SystemImage& image, EpochState& state, NodeId id, Word value) {
  if (id.index() >= image.config().total_nodes) {
    throw HostIoError("preload targets node " + std::to_string(id.index()) +
                      " outside the array");
  }
  state.prev[id.index()] = value;
}

namespace {

void evaluate_range(std::span<const NodeProgram> programs, std::span<const BroadcastEvent> stream,
                    const EpochState& state, std::vector<Word>& next, EpochStats& stats) {
  std::vector<MatchedInput> inputs;
  for (const auto& p : programs) {
    Word out;
    if (p.opcode == Opcode::Const) {
      out = state.registers[p.id.index()];
    } else {
      stats.matches += gather_inputs(p.table, stream, inputs);
      out = eval_node(p, inputs);
    }
    next[p.id.index()] = out;
    ++stats.ops_by_opcode[static_cast<std::size_t>(p.opcode)];
  }
}

}  // namespace

EpochStats step_epoch(const SystemImage& image, EpochState& state, const HostInputs& inputs,
                      const CurrentModel& current) {
  const SystemConfig& cfg = image.config();
  write_registers(image, state, inputs, false);

  // Each chip emits its slots; the bridge chain merges them into one round.
  const auto chips = image.chips();
  std::vector<BroadcastEvent> stream;
  std::vector<BroadcastEvent> local;
  for (const auto& chip : chips) {
    emit_local_stream(chip, state.prev, cfg.mode, local);
    stream = stream.empty() ? local : merge_streams(local, stream);
  }
  check_slot_order(stream);

  EpochStats stats;
  stats.epochs = 1;
  stats.broadcasts = stream.size();
  stats.bridge_transfers = chips.empty() ? 0 : (chips.size() - 1) * stream.size();
  stats.slots = cfg.total_nodes;

  std::fill(state.next.begin(), state.next.end(), Word{0});
  const auto programs = image.programs();
  const std::size_t workers = std::min<std::size_t>(cfg.threads, std::max<std::size_t>(1, programs.size()));
  if (workers <= 1) {
    evaluate_range(programs, stream, state, state.next, stats);
  } else {
    // Nodes write disjoint slots of `next`; counters merge afterwards.
    std::vector<EpochStats> partial(workers);
    std::vector<std::thread> pool;
    const std::size_t chunk = (programs.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = std::min(programs.size(), w * chunk);
      const std::size_t hi = std::min(programs.size(), lo + chunk);
      pool.emplace_back([&, lo, hi, w] {
        evaluate_range(programs.subspan(lo, hi - lo), stream, state, state.next, partial[w]);
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& p : partial) {
      stats.matches += p.matches;
      for (std::size_t i = 0; i < kOpcodeCount; ++i) stats.ops_by_opcode[i] += p.ops_by_opcode[i];
    }
  }

  stats.sram_reads = stats.matches;
  stats.firing = static_cast<std::size_t>(
      std::count_if(state.next.begin(), state.next.end(), [](Word w) { return w != 0; }));
  stats.energy_mj = estimate_energy(stats, cfg, current);

  std::swap(state.prev, state.next);
  ++state.epoch_index;
  return stats;
}

double estimate_energy(const EpochStats& stats, const SystemConfig& cfg, const CurrentModel& current) {
  if (stats.epochs == 0) return 0.0;
  if (!(cfg.clock_hz > 0.0)) throw ConfigError("clock_hz must be > 0");

  std::size_t total_ops = 0;
  double weighted = 0.0;
  for (std::size_t i = 0; i < kOpcodeCount; ++i) {
    total_ops += stats.ops_by_opcode[i];
    weighted += static_cast<double>(stats.ops_by_opcode[i]) * current.opcode_weights[i];
  }
  const double mix = total_ops == 0 ? 1.0 : weighted / static_cast<double>(total_ops);

  const double chips = static_cast<double>(std::max<std::size_t>(1, cfg.chips()));
  const double current_ma = chip_current_ma(cfg.clock_hz / 1e6, current.condition) * mix * chips;
  const double seconds =
      static_cast<double>(stats.epochs) * static_cast<double>(cfg.total_nodes) / cfg.clock_hz;
  return current_ma * current.supply_v * seconds;
}

const HostInputs& InputSchedule::at(std::size_t epoch) const {
  static const HostInputs kNone;
  auto it = by_epoch_.find(epoch);
  return it == by_epoch_.end() ? kNone : it->second;
}

bool InputSchedule::has_after(std::size_t epoch) const noexcept {
  return by_epoch_.upper_bound(epoch) != by_epoch_.end();
}

RunResult run(const SystemImage& image, const InputSchedule& schedule, const RunOptions& options) {
  for (const auto& [epoch, writes] : schedule.entries()) {
    for (const auto& [id, value] : writes) {
      if (!image.is_input(id)) {
        throw HostIoError("input schedule epoch " + std::to_string(epoch) + " targets node " +
                          std::to_string(id.index()) + ", which is not a CONST input node");
      }
    }
  }

  EpochState state = boot_state(image);
  for (const auto& [id, value] : options.preload) preload(image, state, id, value);
  apply_host_inputs(image, state, schedule.at(0));

  RunResult result;
  const auto outputs = image.output_ids();
  const std::size_t epochs = image.config().max_epochs;
  result.per_epoch.reserve(epochs);
  result.trace.reserve(epochs * outputs.size());

  for (std::size_t e = 1; e <= epochs; ++e) {
    EpochStats stats = step_epoch(image, state, schedule.at(e), options.current);
    for (const NodeId id : outputs) result.trace.push_back({e, id, state.prev[id.index()]});
    result.total += stats;
    result.per_epoch.push_back(stats);
    result.epochs_run = e;
    if (options.stop_at_fixed_point && state.prev == state.next && !schedule.has_after(e)) {
      result.reached_fixed_point = true;
      break;
    }
  }
  result.final_outputs = state.prev;
  return result;
}

RunResult run(std::vector<NodeProgram> programs, const SystemConfig& cfg,
              const InputSchedule& schedule, const RunOptions& options) {
  const SystemImage image(std::move(programs), cfg);
  return run(image, schedule, options);
}

void write_trace_csv(std::ostream& os, std::span<const TraceRow> trace) {
  os << "epoch,node_id,value\n";
  for (const auto& r : trace) os << r.epoch << ',' << r.node.index() << ',' << r.value << '\n';
}

namespace {

void write_stats_fields(std::ostream& os, const EpochStats& s) {
  os << s.broadcasts << ',' << s.matches << ',' << s.sram_reads << ',' << s.bridge_transfers << ','
     << csv::format_number(s.firing_fraction()) << ',' << csv::format_number(s.energy_mj);
  for (auto n : s.ops_by_opcode) os << ',' << n;
  os << '\n';
}

}  // namespace

void write_stats_csv(std::ostream& os, std::span<const EpochStats> per_epoch, const EpochStats& total) {
  os << "epoch,broadcasts,matches,sram_reads,bridge_transfers,firing_fraction,energy_mj";
  for (auto op : kAllOpcodes) os << ",ops_" << opcode_name(op);
  os << '\n';
  for (std::size_t i = 0; i < per_epoch.size(); ++i) {
    os << (i + 1) << ',';
    write_stats_fields(os, per_epoch[i]);
  }
  os << "total,";
  write_stats_fields(os, total);
}

void write_stats_summary(std::ostream& os, const RunResult& result, const SystemConfig& cfg) {
  const auto& t = result.total;
  os << "nodes            " << cfg.total_nodes << " (" << cfg.chips() << " chip"
     << (cfg.chips() == 1 ? "" : "s") << " x " << cfg.nodes_per_chip << ")\n"
     << "mode             " << slot_mode_name(cfg.mode) << '\n'
     << "clock            " << csv::format_number(cfg.clock_hz / 1e6) << " MHz\n"
     << "epochs run       " << result.epochs_run
     << (result.reached_fixed_point ? " (fixed point reached)" : "") << '\n'
     << "broadcasts       " << t.broadcasts << '\n'
     << "matches          " << t.matches << '\n'
     << "sram reads       " << t.sram_reads << '\n'
     << "bridge transfers " << t.bridge_transfers << '\n'
     << "firing fraction  " << csv::format_number(t.firing_fraction()) << '\n'
     << "energy estimate  " << csv::format_number(t.energy_mj) << " mJ (estimate)\n"
     << "ops              ";
  bool first = true;
  for (auto op : kAllOpcodes) {
    if (t.ops(op) == 0) continue;
    os << (first ? "" : " ") << opcode_name(op) << '=' << t.ops(op);
    first = false;
  }
  os << (first ? "none\n" : "\n");
}

namespace {

template <typename T>
bool parse_int(std::string_view s, T& out) {
  s = csv::trim(s);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

InputSchedule parse_input_schedule(std::string_view csv_text) {
  const auto rows = csv::parse(csv_text);
  InputSchedule schedule;
  if (rows.empty()) return schedule;

  const csv::Row expected{"epoch", "node_id", "value"};
  if (rows.front().size() != 3 || csv::trim(rows.front()[0]) != expected[0] ||
      csv::trim(rows.front()[1]) != expected[1] || csv::trim(rows.front()[2]) != expected[2]) {
    throw ConfigError("input schedule header must be: epoch,node_id,value");
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() == 1 && csv::trim(row[0]).empty()) continue;
    std::size_t epoch = 0;
    std::uint32_t node = 0;
    std::int32_t value = 0;
    if (row.size() != 3 || !parse_int(row[0], epoch) || !parse_int(row[1], node) ||
        !parse_int(row[2], value)) {
      throw ConfigError("input schedule row " + std::to_string(r + 1) + " is malformed");
    }
    if (node >= kAddressSpace) {
      throw ConfigError("input schedule row " + std::to_string(r + 1) + ": node id out of range");
    }
    if (value < -32768 || value > 32767) {
      throw ConfigError("input schedule row " + std::to_string(r + 1) + ": value out of 16-bit range");
    }
    schedule.add(epoch, NodeId(static_cast<std::uint16_t>(node)), static_cast<Word>(value));
  }
  return schedule;
}

}  // namespace nvtwin
