// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "nvtwin/config.hpp"
#include "nvtwin/core_model.hpp"
#include "nvtwin/errors.hpp"
#include "nvtwin/validation.hpp"
#include "support/random_programs.hpp"

using namespace nvtwin;

namespace {

NodeProgram make(std::size_t id, Opcode op, std::size_t fan_in, std::int16_t param = 0) {
  NodeProgram p;
  p.id = NodeId::from_index(id);
  p.opcode = op;
  p.param = param;
  for (std::size_t i = 0; i < fan_in; ++i) p.table.add({NodeId::from_index(i), 1});
  return p;
}

std::vector<ViolationKind> kinds(const std::vector<Violation>& v) {
  std::vector<ViolationKind> out;
  for (const auto& x : v) out.push_back(x.kind);
  return out;
}

SystemConfig one_chip() { return SystemConfig{}; }

}  // namespace

TEST_CASE("node ids cover exactly the 16-bit space") {
  CHECK(NodeId::from_index(65535).value == 65535);
  CHECK_THROWS_AS(NodeId::from_index(65536), AddressSpaceExceeded);
}

TEST_CASE("address table keeps entries sorted by source") {
  AddressTable t;
  t.add({NodeId(7), 3});
  t.add({NodeId(2), -1});
  t.add({NodeId(5), 9});
  REQUIRE(t.size() == 3);
  CHECK(t.entries()[0].source == NodeId(2));
  CHECK(t.entries()[1].source == NodeId(5));
  CHECK(t.entries()[2].source == NodeId(7));
  CHECK(t.contains(NodeId(5)));
  CHECK_FALSE(t.contains(NodeId(6)));
  CHECK_FALSE(t.has_duplicate_sources());
  t.add({NodeId(5), 1});
  CHECK(t.has_duplicate_sources());
}

TEST_CASE("opcode names round trip and arity classes") {
  for (auto op : kAllOpcodes) {
    CHECK(parse_opcode(opcode_name(op)) == op);
    CHECK(opcode_from_byte(static_cast<std::uint8_t>(op)) == op);
  }
  CHECK_FALSE(parse_opcode("FOO").has_value());
  CHECK_FALSE(opcode_from_byte(10).has_value());

  for (auto op : {Opcode::Acc, Opcode::Thresh, Opcode::Max, Opcode::Min, Opcode::And, Opcode::Or,
                  Opcode::Xor}) {
    CHECK(arity(op).min == 1);
    CHECK(arity(op).max == 256);
  }
  CHECK(arity(Opcode::Pass).min == 1);
  CHECK(arity(Opcode::Pass).max == 1);
  CHECK(arity(Opcode::Not).max == 1);
  CHECK(arity(Opcode::Const).min == 0);
  CHECK(arity(Opcode::Const).max == 0);
}

TEST_CASE("validate_program: minimal legal PASS node") {
  NodeProgram p = make(5, Opcode::Pass, 0);
  p.table.add({NodeId(4), 1});
  CHECK(validate_program(p, one_chip()).empty());
}

TEST_CASE("validate_program: fan-in boundary at 256") {
  CHECK(validate_program(make(300, Opcode::Acc, 256), one_chip()).empty());
  CHECK(kinds(validate_program(make(300, Opcode::Acc, 257), one_chip())) ==
        std::vector{ViolationKind::FanInExceeded});
}

TEST_CASE("validate_program: id at the array boundary") {
  CHECK(validate_program(make(3199, Opcode::Const, 0), one_chip()).empty());
  CHECK(kinds(validate_program(make(3200, Opcode::Const, 0), one_chip())) ==
        std::vector{ViolationKind::IdOutOfRange});
}

TEST_CASE("validate_program: arity, duplicate sources, source range") {
  CHECK(kinds(validate_program(make(10, Opcode::Pass, 2), one_chip())) ==
        std::vector{ViolationKind::ArityMismatch});
  CHECK(kinds(validate_program(make(10, Opcode::Const, 1), one_chip())) ==
        std::vector{ViolationKind::ArityMismatch});
  CHECK(kinds(validate_program(make(10, Opcode::Acc, 0), one_chip())) ==
        std::vector{ViolationKind::ArityMismatch});

  NodeProgram dup = make(10, Opcode::Acc, 2);
  dup.table.add({NodeId(1), 4});
  CHECK(kinds(validate_program(dup, one_chip())) == std::vector{ViolationKind::DuplicateSource});

  NodeProgram far = make(10, Opcode::Pass, 0);
  far.table.add({NodeId(3200), 1});
  CHECK(kinds(validate_program(far, one_chip())) == std::vector{ViolationKind::SourceOutOfRange});
}

TEST_CASE("validate_system reports duplicate node ids") {
  std::vector<NodeProgram> ps{make(1, Opcode::Const, 0), make(1, Opcode::Const, 0)};
  const auto v = validate_system(ps, one_chip());
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == ViolationKind::DuplicateNodeId);
  CHECK_FALSE(format_violation(v[0]).empty());
}

TEST_CASE("eval_node examples") {
  const NodeProgram pass = make(0, Opcode::Pass, 1);
  const std::vector<MatchedInput> five{{5, 1}};
  CHECK(eval_node(pass, five) == 5);

  const NodeProgram thresh = make(0, Opcode::Thresh, 2, 10);
  const std::vector<MatchedInput> ten{{3, 2}, {4, 1}};
  CHECK(eval_node(thresh, ten) == 1);
  const NodeProgram thresh11 = make(0, Opcode::Thresh, 2, 11);
  CHECK(eval_node(thresh11, ten) == 0);

  const NodeProgram x = make(0, Opcode::Xor, 2);
  const std::vector<MatchedInput> bits{{0b1100, 5}, {0b1010, -7}};
  CHECK(eval_node(x, bits) == 0b0110);

  const NodeProgram acc = make(0, Opcode::Acc, 1);
  const std::vector<MatchedInput> big{{32767, 127}};
  CHECK(eval_node(acc, big) == 32767);
  const std::vector<MatchedInput> low{{-32768, 127}};
  CHECK(eval_node(acc, low) == -32768);
}

TEST_CASE("eval_node remaining opcodes") {
  const std::vector<MatchedInput> in{{-3, 1}, {7, -1}, {2, 0}};
  CHECK(eval_node(make(0, Opcode::Max, 3), in) == 7);
  CHECK(eval_node(make(0, Opcode::Min, 3), in) == -3);
  const std::vector<MatchedInput> b{{0b0110, 1}, {0b0011, 1}};
  CHECK(eval_node(make(0, Opcode::And, 2), b) == 0b0010);
  CHECK(eval_node(make(0, Opcode::Or, 2), b) == 0b0111);
  const std::vector<MatchedInput> one{{0, 1}};
  CHECK(eval_node(make(0, Opcode::Not, 1), one) == -1);
  CHECK(eval_node(make(0, Opcode::Const, 0, -12), {}) == -12);
}

TEST_CASE("eval_node rejects arity violations") {
  const std::vector<MatchedInput> two{{1, 1}, {2, 1}};
  CHECK_THROWS_AS(eval_node(make(0, Opcode::Pass, 1), two), ContractError);
  CHECK_THROWS_AS(eval_node(make(0, Opcode::Acc, 1), {}), ContractError);
  CHECK_THROWS_AS(eval_node(make(0, Opcode::Const, 0), two), ContractError);
}

TEST_CASE("THRESH compares the clamped sum") {
  // 2 * 32767 * 127 overflows int16 but not the 32-bit accumulator.
  const std::vector<MatchedInput> in{{32767, 127}, {32767, 127}};
  CHECK(eval_node(make(0, Opcode::Thresh, 2, 32767), in) == 1);
  const std::vector<MatchedInput> neg{{-32768, 127}, {-32768, 127}};
  CHECK(eval_node(make(0, Opcode::Thresh, 2, -32768), neg) == 1);
  CHECK(eval_node(make(0, Opcode::Thresh, 2, -32767), neg) == 0);
}

TEST_CASE("accumulator saturates at 32 bits before the cast") {
  CHECK(saturate_to_word(40000) == 32767);
  CHECK(saturate_to_word(-40000) == -32768);
  CHECK(saturate_to_word(-5) == -5);
  // 256 * 32767 * 127 < 2^31, so the widest legal table never hits the 32-bit rail.
  std::vector<MatchedInput> wide(256, MatchedInput{32767, 127});
  CHECK(weighted_sum(wide) == 256 * 32767 * 127);
  std::vector<MatchedInput> wide_neg(256, MatchedInput{-32768, -128});
  CHECK(weighted_sum(wide_neg) == 256 * 32768 * 128);
}

TEST_CASE("reducers are order independent and bitwise ops ignore weights") {
  std::mt19937_64 rng(0xC0FFEE);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 256)(rng);
    std::vector<MatchedInput> in(n);
    for (auto& m : in) m = {testing::random_word(rng), testing::random_weight(rng)};
    auto shuffled = in;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto reweighted = in;
    for (auto& m : reweighted) m.weight = testing::random_weight(rng);

    for (auto op : {Opcode::Acc, Opcode::Max, Opcode::Min, Opcode::And, Opcode::Or, Opcode::Xor}) {
      const NodeProgram p = make(0, op, n);
      const Word base = eval_node(p, in);
      CHECK(eval_node(p, in) == base);
      CHECK(eval_node(p, shuffled) == base);
      if (is_bitwise(op)) CHECK(eval_node(p, reweighted) == base);
    }
  }
}

TEST_CASE("eval_node agrees with the reference arithmetic") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto p = testing::random_program(rng, 0, 300, {.wide_probability = 0.3});
    std::vector<std::int64_t> prev(300);
    for (auto& v : prev) v = testing::random_word(rng);
    std::vector<std::int64_t> regs(300, p.param);
    std::vector<MatchedInput> in;
    for (const auto& e : p.table.entries()) in.push_back({static_cast<Word>(prev[e.source.index()]), e.weight});
    const auto ref = testing::ref_eval(testing::to_ref_nodes(std::span(&p, 1)).front(), prev, regs);
    CHECK(eval_node(p, in) == ref);
  }
}

TEST_CASE("config checks and slot mode names") {
  CHECK(parse_slot_mode("dense") == SlotMode::Dense);
  CHECK(parse_slot_mode("SPARSE") == SlotMode::Sparse);
  CHECK_FALSE(parse_slot_mode("burst").has_value());

  SystemConfig cfg;
  CHECK_NOTHROW(check_config(cfg));
  cfg.total_nodes = 65536;
  CHECK(cfg.chips() == 21);
  CHECK_NOTHROW(check_config(cfg));
  cfg.total_nodes = 65537;
  CHECK_THROWS_AS(check_config(cfg), AddressSpaceExceeded);
  cfg = SystemConfig{};
  cfg.clock_hz = 0;
  CHECK_THROWS_AS(check_config(cfg), ConfigError);
  cfg = SystemConfig{};
  cfg.total_nodes = 22 * 100;
  cfg.nodes_per_chip = 100;
  CHECK_THROWS_AS(check_config(cfg), ConfigError);
  cfg.enforce_chip_limit = false;
  CHECK_NOTHROW(check_config(cfg));
}
