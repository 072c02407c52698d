// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "nvtwin/errors.hpp"
#include "nvtwin/interconnect.hpp"

using namespace nvtwin;

namespace {

BroadcastEvent ev(std::size_t s, Word v) { return {NodeId::from_index(s), v}; }

}  // namespace

TEST_CASE("match: set intersection in table order") {
  AddressTable t;
  t.add({NodeId(2), 11});
  t.add({NodeId(7), -3});
  const std::vector<BroadcastEvent> stream{ev(2, 10), ev(5, 1), ev(7, 3)};
  const auto m = match(t, stream);
  REQUIRE(m.size() == 2);
  CHECK(m[0] == MatchedInput{10, 11});
  CHECK(m[1] == MatchedInput{3, -3});
}

TEST_CASE("match: empty table and empty stream") {
  const std::vector<BroadcastEvent> stream{ev(0, 1), ev(1, 2)};
  CHECK(match(AddressTable{}, stream).empty());
  AddressTable t;
  t.add({NodeId(1), 1});
  CHECK(match(t, {}).empty());
}

TEST_CASE("match: 256-entry table against a dense 3200-event stream") {
  AddressTable t;
  for (std::size_t s = 0; s < 256; ++s) t.add({NodeId::from_index(s), 1});
  std::vector<BroadcastEvent> stream;
  for (std::size_t s = 0; s < 3200; ++s) stream.push_back(ev(s, static_cast<Word>(s)));

  std::set<std::size_t> sources;
  for (const auto& e : stream) sources.insert(e.source.index());
  std::size_t expected = 0;
  for (const auto& e : t.entries()) expected += sources.count(e.source.index());

  const auto m = match(t, stream);
  CHECK(expected == 256);
  CHECK(m.size() == expected);
  for (std::size_t i = 0; i < m.size(); ++i) CHECK(m[i].value == static_cast<Word>(i));
}

TEST_CASE("match rejects an unordered stream") {
  AddressTable t;
  t.add({NodeId(1), 1});
  const std::vector<BroadcastEvent> bad{ev(3, 1), ev(1, 1)};
  CHECK_THROWS_AS(match(t, bad), ContractError);
  const std::vector<BroadcastEvent> twice{ev(1, 1), ev(1, 2)};
  CHECK_THROWS_AS(match(t, twice), ContractError);
}

TEST_CASE("gather_inputs fills silent slots with zero") {
  AddressTable t;
  t.add({NodeId(1), 2});
  t.add({NodeId(4), 3});
  t.add({NodeId(9), 4});
  const std::vector<BroadcastEvent> stream{ev(1, 5), ev(9, 6)};
  std::vector<MatchedInput> out;
  CHECK(gather_inputs(t, stream, out) == 2);
  REQUIRE(out.size() == 3);
  CHECK(out[0] == MatchedInput{5, 2});
  CHECK(out[1] == MatchedInput{0, 3});
  CHECK(out[2] == MatchedInput{6, 4});
}

TEST_CASE("random match agrees with a brute-force intersection") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 1000)(rng);
    std::vector<BroadcastEvent> stream;
    for (std::size_t s = 0; s < n; ++s) {
      if (rng() % 3 == 0) stream.push_back(ev(s, static_cast<Word>(rng())));
    }
    AddressTable t;
    for (std::size_t s = 0; s < n && t.size() < 256; ++s) {
      if (rng() % 4 == 0) t.add({NodeId::from_index(s), static_cast<Weight>(rng())});
    }
    std::vector<MatchedInput> expected;
    for (const auto& e : t.entries()) {
      for (const auto& b : stream) {
        if (b.source == e.source) expected.push_back({b.value, e.weight});
      }
    }
    CHECK(match(t, stream) == expected);
  }
}

TEST_CASE("merge_streams examples") {
  const std::vector<BroadcastEvent> local{ev(0, 1), ev(1, 2)};
  const std::vector<BroadcastEvent> fwd{ev(3200, 3)};
  const std::vector<BroadcastEvent> want{ev(0, 1), ev(1, 2), ev(3200, 3)};
  CHECK(merge_streams(local, fwd) == want);
  CHECK(merge_streams(fwd, local) == want);
  CHECK(merge_streams({}, {}).empty());
}

TEST_CASE("merge_streams: interleaved streams from three chips") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<BroadcastEvent> chip[3];
    std::vector<BroadcastEvent> all;
    for (std::size_t s = 0; s < 600; ++s) {
      if (rng() % 2) continue;
      const auto e = ev(s, static_cast<Word>(rng()));
      chip[rng() % 3].push_back(e);
      all.push_back(e);
    }
    std::sort(all.begin(), all.end(), [](auto& a, auto& b) { return a.source < b.source; });
    const auto merged = merge_streams(chip[2], merge_streams(chip[1], chip[0]));
    CHECK(is_slot_ordered(merged));
    CHECK(merged == all);
  }
}

TEST_CASE("merge_streams: slot collision is a protocol error") {
  const std::vector<BroadcastEvent> a{ev(4, 1)};
  const std::vector<BroadcastEvent> b{ev(4, 2)};
  CHECK_THROWS_AS(merge_streams(a, b), ProtocolError);
  const std::vector<BroadcastEvent> bad{ev(5, 1), ev(4, 1)};
  CHECK_THROWS_AS(merge_streams(bad, {}), ContractError);
}

TEST_CASE("plan_chips examples") {
  const auto full = plan_chips(65536, 3200);
  REQUIRE(full.size() == 21);
  CHECK(full.front() == ChipBridge{0, 0, 3200});
  CHECK(full.back() == ChipBridge{20, 64000, 65536});
  for (std::size_t k = 1; k < full.size(); ++k) CHECK(full[k].low == full[k - 1].high);

  const auto one = plan_chips(3200, 3200);
  REQUIRE(one.size() == 1);
  CHECK(one[0] == ChipBridge{0, 0, 3200});

  CHECK(plan_chips(3201, 3200).size() == 2);
  CHECK_THROWS_AS(plan_chips(65537, 3200), AddressSpaceExceeded);
  CHECK_THROWS_AS(plan_chips(100, 0), ConfigError);
  CHECK_THROWS_AS(plan_chips(2200, 100), ConfigError);
  CHECK(plan_chips(2200, 100, false).size() == 22);
}

TEST_CASE("chip_of and local streams") {
  const auto plan = plan_chips(10, 4);
  CHECK(chip_of(plan, NodeId(0)) == 0);
  CHECK(chip_of(plan, NodeId(4)) == 1);
  CHECK(chip_of(plan, NodeId(9)) == 2);
  CHECK_THROWS_AS(chip_of(plan, NodeId(10)), ContractError);

  const std::vector<Word> outputs{0, 1, 0, 2, 0, 0, 3, 0, 0, 4};
  std::vector<BroadcastEvent> dense;
  emit_local_stream(plan[1], outputs, SlotMode::Dense, dense);
  CHECK(dense == std::vector{ev(4, 0), ev(5, 0), ev(6, 3), ev(7, 0)});
  std::vector<BroadcastEvent> sparse;
  emit_local_stream(plan[1], outputs, SlotMode::Sparse, sparse);
  CHECK(sparse == std::vector{ev(6, 3)});
}
