// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, exit 1 if any fail.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "nvtwin/boot_image.hpp"
#include "nvtwin/compiler.hpp"
#include "nvtwin/errors.hpp"
#include "nvtwin/interconnect.hpp"
#include "nvtwin/netlist.hpp"
#include "nvtwin/perfmodel.hpp"
#include "nvtwin/simulator.hpp"
#include "nvtwin/validation.hpp"
#include "support/random_programs.hpp"
#include "support/reference_executor.hpp"

using namespace nvtwin;
namespace fs = std::filesystem;

namespace {

/// Collects the first few failure reasons for one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
  }
  void near(double actual, double expected, double tol, const std::string& what) {
    std::ostringstream msg;
    msg.precision(10);
    msg << what << ": got " << actual << ", want " << expected << " +/- " << tol;
    expect(std::isfinite(actual) && std::abs(actual - expected) <= tol, msg.str());
  }
  template <typename E, typename F>
  void throws(F&& f, const std::string& what) {
    try {
      f();
    } catch (const E&) {
      return;
    } catch (const std::exception& e) {
      expect(false, what + ": wrong exception: " + e.what());
      return;
    }
    expect(false, what + ": no exception");
  }
};

HardwareSpec find_row(const std::vector<HardwareSpec>& ds, const std::string& prefix) {
  for (const auto& s : ds) {
    if (s.name.rfind(prefix, 0) == 0) return s;
  }
  throw std::runtime_error("dataset has no row " + prefix);
}

// 1 -------------------------------------------------------------------------
void bandwidth(Check& c) {
  c.near(peak_bandwidth_gib_s(3200, 50e6, 24), 447.0, 0.5, "peak_bandwidth(3200, 50 MHz, 24)");
}

// 2 -------------------------------------------------------------------------
void utilization_table(Check& c) {
  const auto ds = shipped_dataset();
  c.near(utilization(find_row(ds, "NVIDIA H100"), 6.0) * 100, 0.03, 0.005, "H100 at 6 bytes/op");
  c.near(utilization(find_row(ds, "Non-Von NV1 (1 chip)")) * 100, 100.0, 0.0, "NV1 single chip");
  c.near(utilization(find_row(ds, "Cerebras"), 6.0) * 100, 100.0, 0.0, "Cerebras at 6 bytes/op");

  const std::vector<std::pair<std::string, double>> vendor{
      {"NVIDIA Jetson TX2", 0.73}, {"NVIDIA Jetson Orin", 0.06}, {"Google TPUv4", 0.07},
      {"Intel Habana Gaudi 2", 0.63},      {"Tenstorrent Grayskull", 0.01}, {"Google Coral", 0.03},
      {"Graphcore", 0.03},          {"Embedded CPU ARM Cortex-A8", 50.8}};
  for (const auto& [prefix, shown] : vendor) {
    const auto s = find_row(ds, prefix);
    c.expect(s.reported_utilization_pct && *s.reported_utilization_pct == shown,
             prefix + ": reported value does not carry the displayed figure");
    bool within = false;
    if (s.mem_bandwidth_gb_s && s.tops) within = std::abs(utilization(s, 6.0) * 100 - shown) <= 0.05;
    c.expect(within || !s.note.empty(), prefix + ": off by more than 0.05 pp and no sourcing note");
  }
}

// 3 -------------------------------------------------------------------------
void current_table(Check& c) {
  const std::vector<std::tuple<CurrentCondition, double, double>> want{
      {CurrentCondition::DinVss, 3.25, 6.3},
      {CurrentCondition::DinDvdd, 3.23, 6.4},
      {CurrentCondition::DinQuarterClk, 5.10, 6.4},
      {CurrentCondition::DinHalfClk, 6.95, 6.4}};
  for (const auto& [cond, slope, intercept] : want) {
    const std::string n(condition_name(cond));
    c.expect(chip_current_ma(0, cond) == intercept, n + ": intercept not exact");
    c.expect(current_line(cond).slope_ma_per_mhz == slope, n + ": slope not exact");
    c.near(chip_current_ma(1, cond) - chip_current_ma(0, cond), slope, 1e-12, n + ": I(1) - I(0)");
  }
}

// 4 -------------------------------------------------------------------------
void adjusted_power(Check& c) {
  c.near(adjusted_power_mw(243, 28), 15, 0.5, "243 mW at 28 nm");
  c.near(adjusted_power_mw(20348, 12), 6924, 5, "20348 mW at 12 nm");
  for (double p : {0.5, 243.0, 20348.0, 700000.0}) {
    c.expect(adjusted_power_mw(p, 7) == p, "7 nm identity for " + std::to_string(p));
  }
}

// 5 -------------------------------------------------------------------------
void oracle_equivalence(Check& c) {
  std::mt19937_64 rng(0x5EED0005);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 512)(rng);
    testing::RandomSystemOptions o;
    o.wide_probability = 0.15;
    const auto programs = testing::random_system(rng, n, o);
    InputSchedule sched;
    testing::RefSchedule ref_sched;
    testing::random_schedule(rng, programs, 20, sched, ref_sched);

    SystemConfig cfg;
    cfg.total_nodes = n;
    cfg.max_epochs = 20;
    cfg.mode = trial % 2 ? SlotMode::Sparse : SlotMode::Dense;
    const auto got = run(programs, cfg, sched);
    const auto want = testing::reference_run(programs, n, 20, ref_sched);
    c.expect(testing::as_ref_trace(got.trace) == want.trace, "trace differs, trial " + std::to_string(trial));
    std::vector<std::int64_t> finals(got.final_outputs.begin(), got.final_outputs.end());
    c.expect(finals == want.final_outputs, "final outputs differ, trial " + std::to_string(trial));
  }
}

// 6 -------------------------------------------------------------------------
void multichip(Check& c) {
  std::mt19937_64 rng(0x5EED0006);
  const std::size_t ks[] = {2, 3, 21};
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = ks[trial % 3];
    // Chip size and total chosen so the plan has exactly k chips.
    const std::size_t per_chip = std::uniform_int_distribution<std::size_t>(k == 21 ? 5 : 20, k == 21 ? 30 : 150)(rng);
    const std::size_t n = per_chip * (k - 1) + std::uniform_int_distribution<std::size_t>(1, per_chip)(rng);
    const auto programs = testing::random_system(rng, n);
    InputSchedule sched;
    testing::RefSchedule unused;
    testing::random_schedule(rng, programs, 15, sched, unused);

    SystemConfig single;
    single.total_nodes = n;
    single.nodes_per_chip = n;
    single.max_epochs = 15;
    SystemConfig split = single;
    split.nodes_per_chip = per_chip;
    const bool sparse = trial % 2 == 0;
    single.mode = split.mode = sparse ? SlotMode::Sparse : SlotMode::Dense;

    const auto a = run(programs, single, sched);
    const auto b = run(programs, split, sched);
    const std::string t = "trial " + std::to_string(trial) + " k=" + std::to_string(k);
    c.expect(split.chips() == k, t + ": plan has " + std::to_string(split.chips()) + " chips");
    c.expect(a.trace == b.trace, t + ": traces differ");
    c.expect(a.final_outputs == b.final_outputs, t + ": final outputs differ");
    c.expect(b.total.bridge_transfers == (k - 1) * b.total.broadcasts, t + ": bridge transfer count");
  }
}

// 7 -------------------------------------------------------------------------
void epoch_semantics(Check& c) {
  for (std::size_t n : {2u, 10u, 257u}) {
    std::vector<NodeProgram> ring;
    for (std::size_t i = 0; i < n; ++i) {
      NodeProgram p;
      p.id = NodeId::from_index(i);
      p.is_output = i == 0;
      p.table.add({NodeId::from_index((i + n - 1) % n), 1});
      ring.push_back(p);
    }
    SystemConfig cfg;
    cfg.total_nodes = n;
    cfg.max_epochs = n;
    RunOptions o;
    o.preload = {{NodeId(0), 1234}};
    const auto r = run(ring, cfg, {}, o);
    std::size_t first = 0;
    for (const auto& row : r.trace) {
      if (row.value == 1234) {
        first = row.epoch;
        break;
      }
    }
    c.expect(first == n, "ring " + std::to_string(n) + ": token back at epoch " + std::to_string(first));
  }

  auto gate = [](Opcode op, std::vector<Word> in) {
    std::vector<NodeProgram> ps;
    NodeProgram g;
    g.id = NodeId::from_index(in.size());
    g.opcode = op;
    g.is_output = true;
    for (std::size_t i = 0; i < in.size(); ++i) {
      NodeProgram k;
      k.id = NodeId::from_index(i);
      k.opcode = Opcode::Const;
      k.param = in[i];
      ps.push_back(k);
      g.table.add({k.id, 1});
    }
    ps.push_back(g);
    SystemConfig cfg;
    cfg.total_nodes = in.size() + 1;
    cfg.max_epochs = 1;
    return run(ps, cfg, {}).trace.at(0).value;
  };
  for (int a : {0, 1}) {
    c.expect(gate(Opcode::Not, {Word(a)}) == static_cast<Word>(~a), "NOT " + std::to_string(a));
    c.expect((gate(Opcode::Not, {Word(a)}) & 1) == (1 - a), "NOT low bit " + std::to_string(a));
    for (int b : {0, 1}) {
      const std::string ab = std::to_string(a) + std::to_string(b);
      c.expect(gate(Opcode::And, {Word(a), Word(b)}) == (a & b), "AND " + ab);
      c.expect(gate(Opcode::Or, {Word(a), Word(b)}) == (a | b), "OR " + ab);
      c.expect(gate(Opcode::Xor, {Word(a), Word(b)}) == (a ^ b), "XOR " + ab);
      for (int d : {0, 1}) {
        const std::string abd = ab + std::to_string(d);
        c.expect(gate(Opcode::And, {Word(a), Word(b), Word(d)}) == (a & b & d), "AND3 " + abd);
        c.expect(gate(Opcode::Or, {Word(a), Word(b), Word(d)}) == (a | b | d), "OR3 " + abd);
        c.expect(gate(Opcode::Xor, {Word(a), Word(b), Word(d)}) == (a ^ b ^ d), "XOR3 " + abd);
      }
    }
  }
}

// 8 -------------------------------------------------------------------------
void compiler_correctness(Check& c) {
  std::mt19937_64 rng(0x5EED0008);
  LayeredGraph g;
  g.input_count = 300;
  GraphNeuron neuron;
  std::vector<int> w(300);
  for (std::size_t i = 0; i < 300; ++i) {
    w[i] = std::uniform_int_distribution<int>(-5, 5)(rng);
    neuron.inputs.push_back({i, double(w[i])});
  }
  g.layers.push_back({Activation::Linear, {neuron}});
  const auto compiled = compile_graph(g, SystemConfig{}, {.scale = 1.0});
  const SystemConfig cfg0 = config_for(compiled, SystemConfig{});
  c.expect(compiled.relay_count == 2, "fan-in 300 should use 2 relays");
  for (const auto& p : compiled.programs) {
    c.expect(validate_program(p, cfg0).empty(), "compiled node " + std::to_string(p.id.index()) + " invalid");
  }

  SystemConfig cfg = cfg0;
  cfg.max_epochs = compiled.latency_epochs;
  const SystemImage image(compiled.programs, cfg);
  // |x| <= 20 and |w| <= 5: every partial and full sum stays inside int16.
  for (int trial = 0; trial < 1000; ++trial) {
    InputSchedule sched;
    std::int64_t dot = 0;
    for (std::size_t i = 0; i < 300; ++i) {
      const int x = std::uniform_int_distribution<int>(-20, 20)(rng);
      sched.add(0, compiled.inputs[i], static_cast<Word>(x));
      dot += std::int64_t{x} * w[i];
    }
    const auto r = run(image, sched);
    c.expect(r.final_outputs[compiled.outputs[0].index()] == dot, "split sum differs, trial " + std::to_string(trial));
  }

  // Random multi-layer graphs also compile to valid programs.
  for (int trial = 0; trial < 20; ++trial) {
    LayeredGraph rg;
    rg.input_count = std::uniform_int_distribution<std::size_t>(1, 600)(rng);
    std::size_t width = rg.input_count;
    const std::size_t layers = std::uniform_int_distribution<std::size_t>(1, 3)(rng);
    for (std::size_t l = 0; l < layers; ++l) {
      GraphLayer layer;
      layer.activation = rng() % 2 ? Activation::Step : Activation::Linear;
      const std::size_t count = std::uniform_int_distribution<std::size_t>(1, 20)(rng);
      for (std::size_t i = 0; i < count; ++i) {
        GraphNeuron nn;
        for (auto s : testing::random_sources(rng, width, std::uniform_int_distribution<std::size_t>(1, width)(rng))) {
          nn.inputs.push_back({s, std::uniform_real_distribution<double>(-1, 1)(rng)});
        }
        layer.neurons.push_back(nn);
      }
      width = count;
      rg.layers.push_back(layer);
    }
    const auto rc = compile_graph(rg, SystemConfig{});
    c.expect(validate_system(rc.programs, config_for(rc, SystemConfig{})).empty(),
             "random graph " + std::to_string(trial) + " compiled to invalid programs");
  }

  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 120)(rng);
    testing::RandomSystemOptions o;
    o.hole_probability = 0.2;
    o.wide_probability = 0.05;
    const auto programs = testing::random_system(rng, n, o);
    const BootImage img{static_cast<std::uint16_t>(rng()), programs};
    const auto bytes = encode_boot_image(img);
    const auto back = decode_boot_image(bytes);
    c.expect(back == img, "image " + std::to_string(trial) + " decoded differently");
    c.expect(encode_boot_image(back) == bytes, "image " + std::to_string(trial) + " re-encoded differently");
  }
}

// 9 -------------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism(Check& c) {
  const fs::path dir = fs::temp_directory_path() / "nvtwin_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::mt19937_64 rng(0x5EED0009);
  const auto programs = testing::random_system(rng, 400);
  std::ofstream(dir / "prog.net", std::ios::binary) << emit_netlist(programs);
  std::string inputs = "epoch,node_id,value\n";
  for (const auto& p : programs) {
    if (p.opcode == Opcode::Const) inputs += "3," + std::to_string(p.id.index()) + ",17\n";
  }
  std::ofstream(dir / "in.csv", std::ios::binary) << inputs;

  const std::vector<std::vector<std::string>> variants{
      {"--mode", "dense"}, {"--mode", "sparse"}, {"--nodes-per-chip", "64"}, {"--threads", "3"}};
  for (std::size_t v = 0; v < variants.size(); ++v) {
    std::string trace[2];
    std::string stats[2];
    std::string out[2];
    for (int rep = 0; rep < 2; ++rep) {
      const auto t = dir / ("t" + std::to_string(v) + "_" + std::to_string(rep) + ".csv");
      const auto s = dir / ("s" + std::to_string(v) + "_" + std::to_string(rep) + ".csv");
      std::vector<std::string> args{"sim", (dir / "prog.net").string(), "-e", "25", "-i", (dir / "in.csv").string(),
                                    "-t", t.string(), "-s", s.string()};
      args.insert(args.end(), variants[v].begin(), variants[v].end());
      std::ostringstream o;
      std::ostringstream e;
      const int code = cli::run(args, o, e);
      c.expect(code == 0, "sim exited " + std::to_string(code) + ": " + e.str());
      trace[rep] = slurp(t);
      stats[rep] = slurp(s);
      out[rep] = o.str() + e.str();
    }
    c.expect(!trace[0].empty() && trace[0] == trace[1], "trace files differ, variant " + std::to_string(v));
    c.expect(!stats[0].empty() && stats[0] == stats[1], "stats files differ, variant " + std::to_string(v));
    c.expect(out[0] == out[1], "console output differs, variant " + std::to_string(v));
  }
  fs::remove_all(dir);
}

// 10 ------------------------------------------------------------------------
void limits(Check& c) {
  SystemConfig cfg;
  auto acc = [](std::size_t fan_in) {
    NodeProgram p;
    p.id = NodeId(3000);
    p.opcode = Opcode::Acc;
    for (std::size_t s = 0; s < fan_in; ++s) p.table.add({NodeId::from_index(s), 1});
    return p;
  };
  c.expect(validate_program(acc(256), cfg).empty(), "fan-in 256 rejected");
  const auto over = validate_program(acc(257), cfg);
  c.expect(over.size() == 1 && over[0].kind == ViolationKind::FanInExceeded, "fan-in 257 not FanInExceeded");

  std::string net;
  for (int i = 0; i < 257; ++i) net += "node " + std::to_string(i) + " CONST\n";
  net += "node 300 ACC\nin 300 <-";
  std::string net256 = net;
  for (int i = 0; i < 256; ++i) net256 += " " + std::to_string(i) + ":1";
  std::string net257 = net256 + " 256:1";
  c.expect(parse_netlist(net256).nodes.back().inputs.size() == 256, "netlist fan-in 256 rejected");
  c.throws<NetlistError>([&] { parse_netlist(net257); }, "netlist fan-in 257");
  c.throws<BootImageError>([&] { encode_boot_image(BootImage{0, {acc(257)}}); }, "boot image fan-in 257");

  c.expect(plan_chips(65536, 3200).size() == 21, "plan_chips(65536, 3200) != 21");
  c.throws<AddressSpaceExceeded>([] { plan_chips(65537, 3200); }, "plan_chips(65537)");
  c.expect(NodeId::from_index(65535).index() == 65535, "id 65535 rejected");
  c.throws<AddressSpaceExceeded>([] { NodeId::from_index(65536); }, "id 65536");
  SystemConfig full;
  full.total_nodes = 65536;
  c.expect(full.chips() == 21, "65536-node config chips");
  try {
    check_config(full);
  } catch (const std::exception& e) {
    c.expect(false, std::string("65536-node config rejected: ") + e.what());
  }
  full.total_nodes = 65537;
  c.throws<AddressSpaceExceeded>([&] { check_config(full); }, "65537-node config");

  NodeProgram top;
  top.id = NodeId(65535);
  top.opcode = Opcode::Const;
  SystemConfig big;
  big.total_nodes = 65536;
  c.expect(validate_program(top, big).empty(), "node 65535 in a full array rejected");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"peak bandwidth 447 GB/s (+/-0.5)", bandwidth},
      {"memory-bound utilization table", utilization_table},
      {"current intercepts and slopes exact", current_table},
      {"process-adjusted power", adjusted_power},
      {"simulator equals dense reference (200 programs x 20 epochs)", oracle_equivalence},
      {"multi-chip transparency (50 systems, k in {2,3,21})", multichip},
      {"epoch semantics: PASS rings and truth tables", epoch_semantics},
      {"compiler split, validity, boot-image round trip", compiler_correctness},
      {"sim determinism (byte-identical files)", determinism},
      {"fan-in 256 and address-space 65536 limits", limits},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      criteria[i].second(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const bool ok = c.failures.empty();
    std::printf("%s %2zu %s\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str());
    for (const auto& f : c.failures) std::printf("       %s\n", f.c_str());
    failed += ok ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
