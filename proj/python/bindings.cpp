// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "nvtwin/boot_image.hpp"
#include "nvtwin/errors.hpp"
#include "nvtwin/interconnect.hpp"
#include "nvtwin/netlist.hpp"
#include "nvtwin/perfmodel.hpp"
#include "nvtwin/simulator.hpp"
#include "nvtwin/validation.hpp"

namespace py = pybind11;
using namespace nvtwin;

namespace {

SystemConfig geometry(const std::vector<NodeProgram>& programs, std::optional<std::size_t> nodes,
                      std::size_t nodes_per_chip) {
  SystemConfig cfg;
  std::size_t highest = 0;
  for (const auto& p : programs) highest = std::max(highest, p.id.index() + 1);
  cfg.total_nodes = nodes.value_or(std::max<std::size_t>(highest, 1));
  cfg.nodes_per_chip = nodes_per_chip;
  return cfg;
}

SlotMode mode_of(const std::string& name) {
  const auto m = parse_slot_mode(name);
  if (!m) throw ConfigError("mode must be 'dense' or 'sparse'");
  return *m;
}

py::dict stats_dict(const EpochStats& s) {
  py::dict d;
  d["epochs"] = s.epochs;
  d["broadcasts"] = s.broadcasts;
  d["matches"] = s.matches;
  d["sram_reads"] = s.sram_reads;
  d["bridge_transfers"] = s.bridge_transfers;
  d["firing_fraction"] = s.firing_fraction();
  d["energy_mj"] = s.energy_mj;
  py::dict ops;
  for (auto op : kAllOpcodes) ops[py::str(std::string(opcode_name(op)))] = s.ops(op);
  d["ops"] = ops;
  return d;
}

py::dict simulate(const std::string& netlist, std::size_t epochs, const std::string& mode,
                  std::optional<std::size_t> nodes, std::size_t nodes_per_chip,
                  const std::vector<std::tuple<std::size_t, std::size_t, int>>& inputs,
                  const std::vector<std::pair<std::size_t, int>>& preload, bool until_fixed_point,
                  unsigned threads) {
  auto programs = to_programs(parse_netlist(netlist));
  SystemConfig cfg = geometry(programs, nodes, nodes_per_chip);
  cfg.max_epochs = epochs;
  cfg.mode = mode_of(mode);
  cfg.threads = std::max(1u, threads);

  auto word = [](int v) {
    if (v < INT16_MIN || v > INT16_MAX) throw ConfigError("value " + std::to_string(v) + " outside int16");
    return static_cast<Word>(v);
  };
  InputSchedule schedule;
  for (const auto& [e, id, v] : inputs) schedule.add(e, NodeId::from_index(id), word(v));
  RunOptions opts;
  opts.stop_at_fixed_point = until_fixed_point;
  for (const auto& [id, v] : preload) opts.preload.emplace_back(NodeId::from_index(id), word(v));

  const RunResult r = run(std::move(programs), cfg, schedule, opts);
  py::list trace;
  for (const auto& row : r.trace) trace.append(py::make_tuple(row.epoch, row.node.index(), row.value));
  py::list per_epoch;
  for (const auto& s : r.per_epoch) per_epoch.append(stats_dict(s));
  py::dict out;
  out["trace"] = trace;
  out["per_epoch"] = per_epoch;
  out["total"] = stats_dict(r.total);
  out["epochs_run"] = r.epochs_run;
  out["reached_fixed_point"] = r.reached_fixed_point;
  out["final_outputs"] = std::vector<int>(r.final_outputs.begin(), r.final_outputs.end());
  return out;
}

std::vector<py::bytes> assemble(const std::string& netlist, std::optional<std::size_t> nodes,
                                std::size_t nodes_per_chip) {
  const auto programs = to_programs(parse_netlist(netlist));
  const SystemConfig cfg = geometry(programs, nodes, nodes_per_chip);
  check_config(cfg);
  const auto violations = validate_system(programs, cfg);
  if (!violations.empty()) throw ConfigError(format_violation(violations.front()));
  std::vector<py::bytes> out;
  for (const auto& img : encode_boot_images(programs, plan_chips(cfg.total_nodes, cfg.nodes_per_chip))) {
    out.emplace_back(reinterpret_cast<const char*>(img.data()), img.size());
  }
  return out;
}

std::string disassemble(const std::vector<std::string>& images) {
  std::vector<NodeProgram> all;
  for (const auto& raw : images) {
    const auto img = decode_boot_image({reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()});
    all.insert(all.end(), img.programs.begin(), img.programs.end());
  }
  std::sort(all.begin(), all.end(), [](const NodeProgram& a, const NodeProgram& b) { return a.id < b.id; });
  return emit_netlist(all);
}

std::vector<std::string> validate(const std::string& netlist, std::optional<std::size_t> nodes,
                                  std::size_t nodes_per_chip) {
  const auto programs = to_programs(parse_netlist(netlist));
  const SystemConfig cfg = geometry(programs, nodes, nodes_per_chip);
  check_config(cfg);
  std::vector<std::string> out;
  for (const auto& v : validate_system(programs, cfg)) out.push_back(format_violation(v));
  return out;
}

double util(double bandwidth_gb_s, double tops, double bytes_per_op) {
  HardwareSpec s;
  s.name = "spec";
  s.mem_bandwidth_gb_s = bandwidth_gb_s;
  s.tops = tops;
  return utilization(s, bytes_per_op);
}

std::string report_csv(std::optional<std::string> dataset, std::optional<double> bytes_per_op) {
  const auto specs = dataset ? load_dataset(*dataset) : shipped_dataset();
  std::ostringstream os;
  write_report_csv(os, compare_report(specs, {bytes_per_op}));
  return os.str();
}

py::list golden_checks(std::optional<std::string> dataset) {
  const auto specs = dataset ? load_dataset(*dataset) : shipped_dataset();
  py::list out;
  for (const auto& c : run_golden_checks(specs)) {
    py::dict d;
    d["name"] = c.name;
    d["expected"] = c.expected;
    d["actual"] = c.actual;
    d["tolerance"] = c.tolerance;
    d["passed"] = c.passed;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_nvtwin, m) {
  m.doc() = "Node-array simulator, toolchain and performance model";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ContractError>(m, "ContractError", base.ptr());
  py::register_exception<ProtocolError>(m, "ProtocolError", base.ptr());
  auto config = py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<AddressSpaceExceeded>(m, "AddressSpaceExceeded", config.ptr());
  py::register_exception<HostIoError>(m, "HostIoError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<IncompleteSpec>(m, "IncompleteSpec", base.ptr());
  py::register_exception<BootImageError>(m, "BootImageError", base.ptr());
  py::register_exception<NetlistError>(m, "NetlistError", base.ptr());

  m.def("peak_bandwidth_gib_s", &peak_bandwidth_gib_s, py::arg("nodes"), py::arg("clock_hz"),
        py::arg("bits_per_read") = kDefaultBitsPerRead);
  m.def("peak_bandwidth_gb_s", &peak_bandwidth_gb_s, py::arg("nodes"), py::arg("clock_hz"),
        py::arg("bits_per_read") = kDefaultBitsPerRead);
  m.def("utilization", &util, py::arg("bandwidth_gb_s"), py::arg("tops"), py::arg("bytes_per_op") = kDefaultBytesPerOp,
        "Fraction of compute a memory system can feed.");
  m.def(
      "chip_current_ma", [](double f, const std::string& c) { return chip_current_ma(f, parse_condition(c)); },
      py::arg("freq_mhz"), py::arg("condition") = "DIN_VSS");
  m.def("adjusted_power_mw", &adjusted_power_mw, py::arg("power_mw"), py::arg("process_nm"));
  m.def("efficiency_tops_per_w", &efficiency_tops_per_w, py::arg("tops"), py::arg("power_w"));
  m.def("compare_report_csv", &report_csv, py::arg("dataset") = py::none(), py::arg("bytes_per_op") = py::none());
  m.def("golden_checks", &golden_checks, py::arg("dataset") = py::none());

  m.def(
      "plan_chips",
      [](std::size_t total, std::size_t per_chip) {
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (const auto& c : plan_chips(total, per_chip)) out.emplace_back(c.low, c.high);
        return out;
      },
      py::arg("total_nodes"), py::arg("nodes_per_chip") = kDefaultNodesPerChip);
  m.def(
      "canonical_netlist", [](const std::string& text) { return emit_netlist(parse_netlist(text)); },
      py::arg("text"));
  m.def("validate", &validate, py::arg("netlist"), py::arg("nodes") = py::none(),
        py::arg("nodes_per_chip") = kDefaultNodesPerChip);
  m.def("assemble", &assemble, py::arg("netlist"), py::arg("nodes") = py::none(),
        py::arg("nodes_per_chip") = kDefaultNodesPerChip);
  m.def("disassemble", &disassemble, py::arg("images"));
  m.def("simulate", &simulate, py::arg("netlist"), py::arg("epochs") = 10, py::arg("mode") = "dense",
        py::arg("nodes") = py::none(), py::arg("nodes_per_chip") = kDefaultNodesPerChip,
        py::arg("inputs") = std::vector<std::tuple<std::size_t, std::size_t, int>>{},
        py::arg("preload") = std::vector<std::pair<std::size_t, int>>{}, py::arg("until_fixed_point") = false,
        py::arg("threads") = 1u);
}
