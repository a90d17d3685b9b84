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

#include "qpnr/benchmarks.hpp"
#include "qpnr/greedy.hpp"
#include "qpnr/grid.hpp"

#include <catch_amalgamated.hpp>

#include <set>

namespace qpnr {
namespace {

using MK = MacroblockKind;

TEST_CASE("spiral positions") {
  const auto ring = spiral_positions(9, 1);
  CHECK(ring.front() == Position{0, 0});
  std::set<Position> distinct(ring.begin(), ring.end());
  CHECK(distinct.size() == 9);
  for (const auto& p : ring) {
    CHECK(std::max(std::abs(p.col), std::abs(p.row)) <= 1);
  }
  for (const auto& p : spiral_positions(30, 2)) {
    CHECK(p.col % 2 == 0);
    CHECK(p.row % 2 == 0);
  }
}

TEST_CASE("greedy examples") {
  const TechnologyParams tech;
  SECTION("single one-qubit gate") {
    const auto r = greedy_layout(parse_qasm("H Q0"), tech);
    CHECK(r.layout.size() == 1);
    CHECK(r.layout.gate_blocks().size() == 1);
    CHECK(area(r.layout) == 1);
    CHECK(r.connections == 0);
    CHECK(r.schedule.total_latency == tech.t_one_qubit_gate);
  }
  SECTION("one CX") {
    const auto seq = parse_qasm("CX Q0,Q1");
    const auto r = greedy_layout(seq, tech);
    CHECK(r.iterations == 2);
    CHECK(r.connections == 1);
    CHECK(r.layout.gate_blocks().size() == 2);
    for (const auto& b : r.layout.blocks()) {
      CHECK((b.has_gate() || b.kind == MK::StraightChannel));
    }
    CHECK(r.layout.size() > 2);
    CHECK(validate_schedule(r.schedule, seq, r.layout, tech).empty());
  }
  SECTION("empty circuit") {
    CHECK_THROWS_AS(greedy_layout(parse_qasm(""), tech), std::invalid_argument);
  }
}

TEST_CASE("greedy on the [[7,1,3]] encoder") {
  const TechnologyParams tech;
  const auto seq = steane_encode();
  const auto r = greedy_layout(seq, tech);
  CHECK(r.layout.valid());
  CHECK(validate_schedule(r.schedule, seq, r.layout, tech).empty());
  const auto tiling = tiling_for(seq.num_qubits());
  CHECK(area(r.layout) < area(tile(qpos_cell(), tiling.nx, tiling.ny)));
  CHECK(greedy_layout(seq, tech).schedule == r.schedule);
}

TEST_CASE("greedy iteration cap") {
  GreedyOptions options;
  options.max_iterations = 1;
  try {
    (void)greedy_layout(parse_qasm("CX Q0,Q1"), {}, options);
    FAIL("expected GreedyError");
  } catch (const GreedyError& e) {
    CHECK(e.last_deadlock.blocked_instruction == 0);
  }
}

} // namespace
} // namespace qpnr
