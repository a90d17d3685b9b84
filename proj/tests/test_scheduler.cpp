// Copyright 2026 The qpnr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "generators.hpp"
#include "qpnr/grid.hpp"
#include "qpnr/scheduler.hpp"

#include <catch_amalgamated.hpp>

#include <queue>
#include <set>

namespace qpnr {
namespace {

using MK = MacroblockKind;

Schedule expect_schedule(const ScheduleResult& r) {
  if (const auto* d = std::get_if<DeadlockReport>(&r)) {
    FAIL("deadlock: " << d->reason);
  }
  return std::get<Schedule>(r);
}

ScheduleResult run(const InstructionSequence& seq, const Layout& layout,
                   const std::vector<BlockId>& initial,
                   const std::optional<GateAssignment>& assignment = std::nullopt,
                   const TechnologyParams& tech = {}) {
  return schedule(seq, layout, initial,
                  critical_path_priorities(build_dataflow(seq), seq, tech), assignment,
                  tech);
}

TEST_CASE("scheduler examples") {
  const TechnologyParams tech;
  SECTION("one gate in place") {
    const Layout one({{MK::DeadEnd, {0, 0}, 0, "A"}});
    const auto seq = parse_qasm("H Q0");
    const auto s = expect_schedule(run(seq, one, {0}));
    CHECK(s.total_latency == tech.t_one_qubit_gate);
    CHECK(s.hops.empty());
  }
  SECTION("CX meeting in the middle") {
    const Layout line({{MK::StraightChannel, {0, 0}, 0, ""},
                       {MK::GateChannel, {1, 0}, 0, "M"},
                       {MK::StraightChannel, {2, 0}, 0, ""}});
    const auto seq = parse_qasm("CX Q0,Q1");
    // Both ions hop one block into the gate, arriving at t_straight.
    const Time expected = tech.t_straight + tech.t_two_qubit_gate;
    CHECK(expect_schedule(run(seq, line, {0, 2})).total_latency == expected);
    CHECK(expect_schedule(run(seq, line, {0, 2}, GateAssignment{{0, "M"}})).total_latency ==
          expected);
  }
  SECTION("serial chain between two locations") {
    const Layout line({{MK::DeadEnd, {0, 0}, 0, "A"},
                       {MK::StraightChannel, {1, 0}, 0, ""},
                       {MK::StraightChannel, {2, 0}, 0, ""},
                       {MK::DeadEnd, {3, 0}, 180, "B"}});
    const auto seq = parse_qasm("H Q0\nX Q0\nMEASURE Q0\nZ Q0");
    const GateAssignment at{{0, "A"}, {1, "B"}, {2, "B"}, {3, "A"}};
    const auto s = expect_schedule(run(seq, line, {0}, at));
    CHECK(s.total_latency == 3 * tech.t_one_qubit_gate + tech.t_measure + 6 * tech.t_straight);
    CHECK(s.hops.size() == 6);
  }
}

TEST_CASE("gate choice without an assignment") {
  SECTION("single free location") {
    const Layout l({{MK::StraightChannel, {0, 0}, 0, ""}, {MK::DeadEnd, {1, 0}, 180, "A"}});
    const auto s = expect_schedule(run(parse_qasm("H Q0"), l, {0}));
    CHECK(s.gates[0].block == 1);
    CHECK(s.total_latency == 2);
  }
  SECTION("qubit already on a location stays") {
    const Layout l({{MK::DeadEnd, {0, 0}, 0, "A"}, {MK::DeadEnd, {1, 0}, 180, "B"}});
    const auto s = expect_schedule(run(parse_qasm("H Q0"), l, {1}));
    CHECK(s.gates[0].block == 1);
    CHECK(s.hops.empty());
  }
  SECTION("three straights beat a straight and a turn") {
    // Start at the three-way; east is 3 straight hops, south then east is
    // t_straight + t_turn = 4.
    const Layout l({{MK::ThreeWayIntersection, {1, 0}, 0, ""},
                    {MK::StraightChannel, {2, 0}, 0, ""},
                    {MK::StraightChannel, {3, 0}, 0, ""},
                    {MK::DeadEnd, {4, 0}, 180, "F"},
                    {MK::Turn, {1, 1}, 270, ""},
                    {MK::DeadEnd, {2, 1}, 180, "T"}});
    REQUIRE(l.valid());
    const auto s = expect_schedule(run(parse_qasm("H Q0"), l, {*l.at({1, 0})}));
    CHECK(s.gates[0].block == *l.find_gate("F"));
    CHECK(s.total_latency == 3 + 1);
  }
}

// Exhaustive search over ion positions on the dead-ended line A - c - B:
// can the ion at A ever reach B while the ion at B reaches A?
bool swap_reachable() {
  using State = std::pair<int, int>;
  std::set<State> seen{{0, 2}};
  std::queue<State> todo;
  todo.push({0, 2});
  while (!todo.empty()) {
    const auto [a, b] = todo.front();
    todo.pop();
    if (a == 2 && b == 0) {
      return true;
    }
    for (int step : {-1, 1}) {
      for (const State& next : {State{a + step, b}, State{a, b + step}}) {
        if (next.first < 0 || next.first > 2 || next.second < 0 || next.second > 2 ||
            next.first == next.second || !seen.insert(next).second) {
          continue;
        }
        todo.push(next);
      }
    }
  }
  return false;
}

TEST_CASE("two ions in one dead-ended channel deadlock") {
  REQUIRE_FALSE(swap_reachable());
  const Layout l({{MK::DeadEnd, {0, 0}, 0, "A"},
                  {MK::StraightChannel, {1, 0}, 0, ""},
                  {MK::DeadEnd, {2, 0}, 180, "B"}});
  const auto seq = parse_qasm("H Q0\nH Q0\nH Q1");
  const GateAssignment at{{0, "B"}, {1, "B"}, {2, "A"}};
  const auto r = run(seq, l, {0, 2}, at);
  const auto* d = std::get_if<DeadlockReport>(&r);
  REQUIRE(d != nullptr);
  CHECK(d->blocked_instruction == 0);
  CHECK(d->qubit_positions.size() == 2);
  CHECK_FALSE(d->reason.empty());
}

TEST_CASE("scheduler argument checks") {
  const Layout l({{MK::DeadEnd, {0, 0}, 0, "A"}, {MK::DeadEnd, {1, 0}, 180, "B"}});
  const auto seq = parse_qasm("CX Q0,Q1");
  CHECK_THROWS_AS(run(seq, l, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(run(seq, l, {0}), std::invalid_argument);
  CHECK_THROWS_AS(run(seq, l, {0, 1}, GateAssignment{{0, "Z"}}), std::invalid_argument);
  CHECK_THROWS_AS(run(seq, l, {0, 1}, GateAssignment{}), std::invalid_argument);
}

TEST_CASE("schedules on tiled fabrics are valid and deterministic") {
  std::mt19937_64 rng(99);
  const auto cell = qpos_cell();
  for (int trial = 0; trial < 40; ++trial) {
    const auto tech = test::random_tech(rng);
    const int qubits = 1 + trial % 6;
    const auto seq = test::random_circuit(rng, qubits, qubits + trial % 25);
    const auto tiling = tiling_for(seq.num_qubits());
    const auto layout = tile(cell, tiling.nx, tiling.ny);
    const auto initial = systematic_placement(cell, tiling, layout, seq.num_qubits());
    const auto first = run(seq, layout, initial, std::nullopt, tech);
    const auto s = expect_schedule(first);
    INFO("trial " << trial);
    CHECK(validate_schedule(s, seq, layout, tech).empty());
    CHECK(expect_schedule(run(seq, layout, initial, std::nullopt, tech)) == s);
    const auto p = critical_path_priorities(build_dataflow(seq), seq, tech);
    CHECK(s.total_latency >= *std::max_element(p.begin(), p.end()));
    CHECK(s.gates.size() == seq.size());
    CHECK(s.stalls.size() == seq.size());
  }
}

TEST_CASE("validator rejects corrupted schedules") {
  const TechnologyParams tech;
  const Layout line({{MK::DeadEnd, {0, 0}, 0, "A"},
                     {MK::StraightChannel, {1, 0}, 0, ""},
                     {MK::GateChannel, {2, 0}, 0, "M"},
                     {MK::StraightChannel, {3, 0}, 0, ""},
                     {MK::DeadEnd, {4, 0}, 180, "B"}});
  const auto seq = parse_qasm("H Q0\nH Q0\nH Q1");
  const GateAssignment at{{0, "A"}, {1, "M"}, {2, "B"}};
  const auto good = expect_schedule(run(seq, line, {0, 4}, at));
  REQUIRE(validate_schedule(good, seq, line, tech).empty());
  REQUIRE(good.hops.size() == 2);

  auto s = good;
  SECTION("dependency order") {
    s.gates[1].start = s.gates[0].start;
    s.gates[1].end = s.gates[1].start + tech.t_one_qubit_gate;
  }
  SECTION("gate latency") { s.gates[0].end += 1; }
  SECTION("hop between non-adjacent blocks") { s.hops[0].to = 3; }
  SECTION("hop latency") { s.hops[0].end += 5; }
  SECTION("gate run elsewhere than the ion") { s.gates[0].block = 3; }
  SECTION("total latency") { s.total_latency += 1; }
  SECTION("two ions on one block") {
    s.initial = {0, 0};
  }
  CHECK_FALSE(validate_schedule(s, seq, line, tech).empty());
}

} // namespace
} // namespace qpnr
