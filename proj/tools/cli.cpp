// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nvtwin/boot_image.hpp"
#include "nvtwin/csv.hpp"
#include "nvtwin/errors.hpp"
#include "nvtwin/interconnect.hpp"
#include "nvtwin/netlist.hpp"
#include "nvtwin/perfmodel.hpp"
#include "nvtwin/simulator.hpp"
#include "nvtwin/validation.hpp"

namespace nvtwin::cli {
namespace {

/// File-system and argument problems; reported with exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes `content` to `path`, or to `out` when path is empty or "-".
void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write '" + path + "'");
  f << content;
  if (!f) throw InputError("write failed for '" + path + "'");
}

std::span<const std::uint8_t> as_bytes(const std::string& s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

struct LoadedSource {
  std::vector<NodeProgram> programs;
  std::size_t images{0};
  std::size_t netlists{0};
};

/// Netlists and boot images are told apart by the image magic.
LoadedSource load_sources(const std::vector<std::string>& paths) {
  LoadedSource src;
  for (const auto& path : paths) {
    const std::string data = read_file(path);
    if (looks_like_boot_image(as_bytes(data))) {
      BootImage img;
      try {
        img = decode_boot_image(as_bytes(data));
      } catch (const BootImageError& e) {
        throw BootImageError(path + ": " + std::string(e.what()));
      }
      src.programs.insert(src.programs.end(), img.programs.begin(), img.programs.end());
      ++src.images;
    } else {
      try {
        auto progs = to_programs(parse_netlist(data));
        src.programs.insert(src.programs.end(), progs.begin(), progs.end());
      } catch (const NetlistError& e) {
        throw InputError(path + ": " + std::string(e.what()));
      }
      ++src.netlists;
    }
  }
  if (src.netlists > 1 || (src.netlists == 1 && src.images > 0)) {
    throw InputError("give one netlist or any number of boot images, not a mix");
  }
  std::sort(src.programs.begin(), src.programs.end(),
            [](const NodeProgram& a, const NodeProgram& b) { return a.id < b.id; });
  return src;
}

struct Geometry {
  std::optional<std::size_t> nodes;
  std::optional<std::size_t> nodes_per_chip;
  std::optional<std::size_t> chips;
  bool no_chip_limit{false};

  void add_to(CLI::App* app) {
    app->add_option("--nodes", nodes, "Total node count (default: highest id + 1)");
    auto* npc = app->add_option("--nodes-per-chip", nodes_per_chip, "Nodes per chiplet (default 3200)");
    app->add_option("--chips", chips, "Split the array evenly over this many chiplets")->excludes(npc);
    app->add_flag("--no-chip-limit", no_chip_limit, "Allow more than 21 chiplets");
  }

  SystemConfig config(std::span<const NodeProgram> programs) const {
    SystemConfig cfg;
    std::size_t highest = 0;
    for (const auto& p : programs) highest = std::max(highest, p.id.index() + 1);
    cfg.total_nodes = nodes.value_or(std::max<std::size_t>(highest, 1));
    if (chips) {
      if (*chips == 0) throw ConfigError("--chips must be at least 1");
      cfg.nodes_per_chip = (cfg.total_nodes + *chips - 1) / *chips;
      if ((cfg.total_nodes + cfg.nodes_per_chip - 1) / cfg.nodes_per_chip != *chips) {
        throw ConfigError(std::to_string(cfg.total_nodes) + " nodes cannot fill " + std::to_string(*chips) +
                          " chiplets");
      }
    } else {
      cfg.nodes_per_chip = nodes_per_chip.value_or(kDefaultNodesPerChip);
    }
    cfg.enforce_chip_limit = !no_chip_limit;
    return cfg;
  }
};

bool parse_format(const std::string& s) {
  if (s == "csv") return true;
  if (s == "text") return false;
  throw InputError("--format must be csv or text");
}

// --- sim --------------------------------------------------------------------

struct SimArgs {
  std::vector<std::string> sources;
  Geometry geometry;
  std::size_t epochs{10};
  std::string inputs;
  std::string mode{"dense"};
  double clock_mhz{50.0};
  unsigned threads{1};
  bool until_fixed_point{false};
  std::vector<std::string> preload;
  std::string condition{"DIN_VSS"};
  double supply_v{0.9};
  std::string trace;
  std::string stats;
  std::string format{"csv"};
  bool quiet{false};
};

std::pair<NodeId, Word> parse_preload(const std::string& item) {
  const auto eq = item.find('=');
  long id = -1;
  long value = 0;
  try {
    if (eq == std::string::npos) throw std::invalid_argument(item);
    std::size_t used = 0;
    id = std::stol(item.substr(0, eq), &used);
    if (used != eq) throw std::invalid_argument(item);
    const std::string v = item.substr(eq + 1);
    value = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(item);
  } catch (const std::logic_error&) {
    throw InputError("--preload expects ID=VALUE, got '" + item + "'");
  }
  if (id < 0 || id >= static_cast<long>(kAddressSpace)) throw InputError("--preload id out of range: " + item);
  if (value < INT16_MIN || value > INT16_MAX) throw InputError("--preload value out of int16 range: " + item);
  return {NodeId::from_index(static_cast<std::size_t>(id)), static_cast<Word>(value)};
}

int cmd_sim(const SimArgs& a, std::ostream& out, std::ostream& err) {
  const bool csv_stats = parse_format(a.format);
  const auto src = load_sources(a.sources);
  SystemConfig cfg = a.geometry.config(src.programs);
  const auto mode = parse_slot_mode(a.mode);
  if (!mode) throw InputError("--mode must be dense or sparse");
  cfg.mode = *mode;
  if (!(a.clock_mhz > 0.0)) throw ConfigError("--clock-mhz must be positive");
  cfg.clock_hz = a.clock_mhz * 1e6;
  cfg.max_epochs = a.epochs;
  cfg.threads = std::max(1u, a.threads);

  InputSchedule schedule;
  if (!a.inputs.empty()) schedule = parse_input_schedule(read_file(a.inputs));

  RunOptions opts;
  opts.stop_at_fixed_point = a.until_fixed_point;
  opts.current.condition = parse_condition(a.condition);
  if (!(a.supply_v > 0.0)) throw ConfigError("--supply-v must be positive");
  opts.current.supply_v = a.supply_v;
  for (const auto& p : a.preload) opts.preload.push_back(parse_preload(p));

  const SystemImage image(src.programs, cfg);
  const RunResult result = run(image, schedule, opts);

  std::ostringstream trace;
  write_trace_csv(trace, result.trace);
  emit(a.trace, trace.str(), out);

  std::ostringstream stats;
  if (csv_stats) {
    write_stats_csv(stats, result.per_epoch, result.total);
  } else {
    write_stats_summary(stats, result, cfg);
  }
  if (!a.stats.empty()) {
    emit(a.stats, stats.str(), out);
  } else if (!a.quiet) {
    std::ostringstream summary;
    write_stats_summary(summary, result, cfg);
    err << summary.str();
  }
  return kExitOk;
}

// --- asm / disasm / validate ------------------------------------------------

struct AsmArgs {
  std::string netlist;
  std::string prefix;
  Geometry geometry;
};

int cmd_asm(const AsmArgs& a, std::ostream& out, std::ostream& err) {
  const auto src = load_sources({a.netlist});
  if (src.netlists != 1) throw InputError("asm expects a netlist, not a boot image");
  const SystemConfig cfg = a.geometry.config(src.programs);
  check_config(cfg);
  const auto violations = validate_system(src.programs, cfg);
  if (!violations.empty()) {
    for (const auto& v : violations) err << a.netlist << ": " << format_violation(v) << '\n';
    return kExitInput;
  }
  const auto plan = plan_chips(cfg.total_nodes, cfg.nodes_per_chip, cfg.enforce_chip_limit);
  const auto images = encode_boot_images(src.programs, plan);

  std::string prefix = a.prefix;
  if (prefix.empty()) {
    const std::filesystem::path p(a.netlist);
    prefix = (p.parent_path() / p.stem()).string();
  }
  for (std::size_t k = 0; k < images.size(); ++k) {
    const std::string path = prefix + ".chip" + std::to_string(k) + ".nv1b";
    emit(path, std::string(images[k].begin(), images[k].end()), out);
    out << path << '\n';
  }
  return kExitOk;
}

struct DisasmArgs {
  std::vector<std::string> images;
  std::string output;
};

int cmd_disasm(const DisasmArgs& a, std::ostream& out, std::ostream&) {
  const auto src = load_sources(a.images);
  if (src.netlists != 0) throw InputError("disasm expects boot images");
  for (std::size_t i = 1; i < src.programs.size(); ++i) {
    if (src.programs[i].id == src.programs[i - 1].id) {
      throw BootImageError("node " + std::to_string(src.programs[i].id.value) + " appears in two images");
    }
  }
  emit(a.output, emit_netlist(src.programs), out);
  return kExitOk;
}

struct ValidateArgs {
  std::vector<std::string> sources;
  Geometry geometry;
};

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
  const auto src = load_sources(a.sources);
  const SystemConfig cfg = a.geometry.config(src.programs);
  check_config(cfg);
  const auto violations = validate_system(src.programs, cfg);
  for (const auto& v : violations) err << format_violation(v) << '\n';
  if (!violations.empty()) {
    err << violations.size() << " violation" << (violations.size() == 1 ? "" : "s") << '\n';
    return kExitInput;
  }
  out << "ok: " << src.programs.size() << " programs, " << cfg.total_nodes << " nodes, " << cfg.chips()
      << " chip" << (cfg.chips() == 1 ? "" : "s") << '\n';
  return kExitOk;
}

// --- perf / power / compare -------------------------------------------------

/// Prints every golden check; returns false if any failed.
bool golden_report(std::span<const HardwareSpec> dataset, std::ostream& out) {
  bool all = true;
  for (const auto& c : run_golden_checks(dataset)) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": expected " << csv::format_number(c.expected)
        << " +/- " << csv::format_number(c.tolerance) << ", got " << csv::format_number(c.actual) << '\n';
    all = all && c.passed;
  }
  return all;
}

std::vector<HardwareSpec> dataset_from(const std::string& path) {
  return path.empty() ? shipped_dataset() : load_dataset(path);
}

void write_table(std::ostream& os, const std::vector<csv::Row>& rows, bool as_csv) {
  if (as_csv) {
    for (const auto& r : rows) csv::write_row(os, r);
    return;
  }
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
  }
  for (const auto& r : rows) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += r[i];
      if (i + 1 < r.size()) line += std::string(width[i] - r[i].size() + 2, ' ');
    }
    os << line << '\n';
  }
}

struct PerfArgs {
  double nodes{static_cast<double>(kDefaultNodesPerChip)};
  double clock_mhz{50.0};
  double bits{kDefaultBitsPerRead};
  std::size_t chips{1};
  bool utilization{false};
  std::string dataset;
  std::optional<double> bytes_per_op;
  std::string format{"csv"};
  std::string output;
  bool golden_check{false};
};

int cmd_perf(const PerfArgs& a, std::ostream& out, std::ostream&) {
  const bool as_csv = parse_format(a.format);
  if (a.golden_check) return golden_report(dataset_from(a.dataset), out) ? kExitOk : kExitInput;
  if (a.bytes_per_op && !(*a.bytes_per_op > 0.0)) throw ConfigError("--bytes-per-op must be positive");

  std::vector<csv::Row> rows;
  if (a.utilization || !a.dataset.empty()) {
    rows.push_back({"name", "bandwidth_gb_s", "tops", "bytes_per_op", "utilization_pct",
                    "reported_utilization_pct", "note"});
    for (const auto& s : dataset_from(a.dataset)) {
      const double bpo = a.bytes_per_op.value_or(s.bytes_per_op.value_or(kDefaultBytesPerOp));
      std::optional<double> u;
      if (s.mem_bandwidth_gb_s && s.tops) u = utilization(s, bpo) * 100.0;
      rows.push_back({s.name, csv::format_optional(s.mem_bandwidth_gb_s), csv::format_optional(s.tops),
                      csv::format_number(bpo), csv::format_optional(u),
                      csv::format_optional(s.reported_utilization_pct), s.note});
    }
  } else {
    if (!(a.nodes > 0.0) || !(a.clock_mhz > 0.0) || !(a.bits > 0.0) || a.chips == 0) {
      throw ConfigError("--nodes, --clock-mhz, --bits and --chips must be positive");
    }
    const double n = a.nodes * static_cast<double>(a.chips);
    const double gib = peak_bandwidth_gib_s(n, a.clock_mhz * 1e6, a.bits);
    rows.push_back({"nodes", "clock_mhz", "bits_per_read", "chips", "peak_bandwidth_gib_s",
                    "peak_bandwidth_gb_s", "peak_bandwidth_tb_s"});
    rows.push_back({csv::format_number(a.nodes), csv::format_number(a.clock_mhz), csv::format_number(a.bits),
                    std::to_string(a.chips), csv::format_number(gib),
                    csv::format_number(peak_bandwidth_gb_s(n, a.clock_mhz * 1e6, a.bits)),
                    csv::format_number(gib / 1000.0)});
  }
  std::ostringstream os;
  write_table(os, rows, as_csv);
  emit(a.output, os.str(), out);
  return kExitOk;
}

struct PowerArgs {
  std::string condition{"DIN_VSS"};
  double from_mhz{0.0};
  double to_mhz{50.0};
  double step_mhz{1.0};
  double supply_v{0.9};
  std::optional<double> adjust_mw;
  std::optional<double> process_nm;
  std::string dataset;
  std::string format{"csv"};
  std::string output;
  bool golden_check{false};
};

int cmd_power(const PowerArgs& a, std::ostream& out, std::ostream&) {
  const bool as_csv = parse_format(a.format);
  if (a.golden_check) return golden_report(dataset_from(a.dataset), out) ? kExitOk : kExitInput;

  std::vector<csv::Row> rows;
  if (a.adjust_mw || a.process_nm) {
    if (!a.adjust_mw || !a.process_nm) throw InputError("--adjust-mw and --process-nm go together");
    rows.push_back({"power_mw", "process_nm", "adjusted_power_mw"});
    rows.push_back({csv::format_number(*a.adjust_mw), csv::format_number(*a.process_nm),
                    csv::format_number(adjusted_power_mw(*a.adjust_mw, *a.process_nm))});
  } else {
    if (!(a.step_mhz > 0.0)) throw ConfigError("--step-mhz must be positive");
    if (a.from_mhz < 0.0 || a.to_mhz < a.from_mhz) throw ConfigError("need 0 <= --from-mhz <= --to-mhz");
    if (!(a.supply_v > 0.0)) throw ConfigError("--supply-v must be positive");
    std::vector<CurrentCondition> conds;
    if (a.condition == "all") {
      for (const auto& line : kCurrentLines) conds.push_back(line.condition);
    } else {
      conds.push_back(parse_condition(a.condition));
    }
    // Index-based stepping keeps the grid free of accumulated rounding.
    const auto steps = static_cast<std::size_t>(std::floor((a.to_mhz - a.from_mhz) / a.step_mhz + 1e-9));
    rows.push_back({"freq_mhz", "condition", "current_ma", "power_mw"});
    for (auto c : conds) {
      for (std::size_t i = 0; i <= steps; ++i) {
        const double f = a.from_mhz + static_cast<double>(i) * a.step_mhz;
        const double ma = chip_current_ma(f, c);
        rows.push_back({csv::format_number(f), std::string(condition_name(c)), csv::format_number(ma),
                        csv::format_number(ma * a.supply_v)});
      }
    }
  }
  std::ostringstream os;
  write_table(os, rows, as_csv);
  emit(a.output, os.str(), out);
  return kExitOk;
}

struct CompareArgs {
  std::string dataset;
  std::optional<double> bytes_per_op;
  std::string format{"csv"};
  std::string output;
  bool golden_check{false};
};

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream&) {
  const bool as_csv = parse_format(a.format);
  const auto specs = dataset_from(a.dataset);
  if (a.golden_check) return golden_report(specs, out) ? kExitOk : kExitInput;
  if (a.bytes_per_op && !(*a.bytes_per_op > 0.0)) throw ConfigError("--bytes-per-op must be positive");
  ReportOptions opts;
  opts.bytes_per_op = a.bytes_per_op;
  const auto rows = compare_report(specs, opts);
  std::ostringstream os;
  if (as_csv) {
    write_report_csv(os, rows);
  } else {
    write_report_text(os, rows);
  }
  emit(a.output, os.str(), out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nvtwin: node-array simulator, toolchain and performance model", "nvtwin"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "nvtwin 0.1.0");

  SimArgs sim;
  auto* s = app.add_subcommand("sim", "Run a netlist or boot images for a number of epochs");
  s->add_option("sources", sim.sources, "Netlist or boot image files")->required();
  sim.geometry.add_to(s);
  s->add_option("-e,--epochs", sim.epochs, "Epochs to run (default 10)");
  s->add_option("-i,--inputs", sim.inputs, "Host input CSV: epoch,node_id,value");
  s->add_option("--mode", sim.mode, "Slot mode: dense or sparse");
  s->add_option("--clock-mhz", sim.clock_mhz, "Clock frequency for energy estimates");
  s->add_option("--threads", sim.threads, "Worker threads per epoch");
  s->add_flag("--until-fixed-point", sim.until_fixed_point, "Stop early once outputs stop changing");
  s->add_option("--preload", sim.preload, "Seed a node's boot output, ID=VALUE (repeatable)");
  s->add_option("--condition", sim.condition, "Current line for energy: DIN_VSS, DIN_DVDD, DIN_QTR_CLK, DIN_HALF_CLK");
  s->add_option("--supply-v", sim.supply_v, "Supply voltage for energy estimates");
  s->add_option("-t,--trace", sim.trace, "Trace CSV path (default stdout)");
  s->add_option("-s,--stats", sim.stats, "Stats output path");
  s->add_option("--format", sim.format, "Stats format: csv or text");
  s->add_flag("-q,--quiet", sim.quiet, "No summary on stderr");

  AsmArgs as;
  auto* a = app.add_subcommand("asm", "Assemble a netlist into one boot image per chiplet");
  a->add_option("netlist", as.netlist, "Netlist file")->required();
  a->add_option("-o,--output", as.prefix, "Output prefix; files are <prefix>.chip<k>.nv1b");
  as.geometry.add_to(a);

  DisasmArgs dis;
  auto* d = app.add_subcommand("disasm", "Print boot images as a canonical netlist");
  d->add_option("images", dis.images, "Boot image files")->required();
  d->add_option("-o,--output", dis.output, "Output path (default stdout)");

  ValidateArgs val;
  auto* v = app.add_subcommand("validate", "Check programs against the architectural limits");
  v->add_option("sources", val.sources, "Netlist or boot image files")->required();
  val.geometry.add_to(v);

  PerfArgs perf;
  auto* p = app.add_subcommand("perf", "Peak bandwidth and memory-bound utilization");
  p->add_option("--nodes", perf.nodes, "Nodes per chip");
  p->add_option("--clock-mhz", perf.clock_mhz, "Clock frequency");
  p->add_option("--bits", perf.bits, "Bits read per node per cycle");
  p->add_option("--chips", perf.chips, "Chiplet count");
  p->add_flag("--utilization", perf.utilization, "Utilization table for the dataset");
  p->add_option("--dataset", perf.dataset, "Dataset CSV (default: built-in)");
  p->add_option("--bytes-per-op", perf.bytes_per_op, "Override bytes per op for every row");
  p->add_option("--format", perf.format, "csv or text");
  p->add_option("-o,--output", perf.output, "Output path (default stdout)");
  p->add_flag("--paper-check", perf.golden_check, "Run the built-in golden checks");

  PowerArgs pow;
  auto* w = app.add_subcommand("power", "Chip current sweep and process-adjusted power");
  w->add_option("--condition", pow.condition, "DIN_VSS, DIN_DVDD, DIN_QTR_CLK, DIN_HALF_CLK or all");
  w->add_option("--from-mhz", pow.from_mhz, "Sweep start");
  w->add_option("--to-mhz", pow.to_mhz, "Sweep end (inclusive)");
  w->add_option("--step-mhz", pow.step_mhz, "Sweep step");
  w->add_option("--supply-v", pow.supply_v, "Supply voltage for the power column");
  w->add_option("--adjust-mw", pow.adjust_mw, "Power to normalize to 7 nm");
  w->add_option("--process-nm", pow.process_nm, "Process node of --adjust-mw");
  w->add_option("--dataset", pow.dataset, "Dataset CSV for --paper-check");
  w->add_option("--format", pow.format, "csv or text");
  w->add_option("-o,--output", pow.output, "Output path (default stdout)");
  w->add_flag("--paper-check", pow.golden_check, "Run the built-in golden checks");

  CompareArgs cmp;
  auto* c = app.add_subcommand("compare", "Utilization, power and efficiency comparison report");
  c->add_option("--dataset", cmp.dataset, "Dataset CSV (default: built-in)");
  c->add_option("--bytes-per-op", cmp.bytes_per_op, "Override bytes per op for every row");
  c->add_option("--format", cmp.format, "csv or text");
  c->add_option("-o,--output", cmp.output, "Output path (default stdout)");
  c->add_flag("--paper-check", cmp.golden_check, "Run the built-in golden checks");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*s) return cmd_sim(sim, out, err);
    if (*a) return cmd_asm(as, out, err);
    if (*d) return cmd_disasm(dis, out, err);
    if (*v) return cmd_validate(val, out, err);
    if (*p) return cmd_perf(perf, out, err);
    if (*w) return cmd_power(pow, out, err);
    if (*c) return cmd_compare(cmp, out, err);
  } catch (const ContractError& e) {
    err << "error: contract violation: " << e.what() << '\n';
    return kExitContract;
  } catch (const ProtocolError& e) {
    err << "error: protocol violation: " << e.what() << '\n';
    return kExitContract;
  } catch (const HostIoError& e) {
    err << "error: host I/O: " << e.what() << '\n';
    return kExitContract;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << '\n';
    return kExitContract;
  }
  return kExitInput;
}

}  // namespace nvtwin::cli
