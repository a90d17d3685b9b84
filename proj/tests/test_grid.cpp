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
#include "qpnr/grid.hpp"

#include <catch_amalgamated.hpp>

#include <set>

namespace qpnr {
namespace {

using MK = MacroblockKind;

Cell single(MK kind, int rotation) {
  return Cell{1, 1, {KindRotation{kind, rotation}}};
}

// Validity by direct construction: toroidal port agreement, a gate, and
// connected 2x2 and 3x3 tilings.
bool oracle_valid(const Cell& cell) {
  bool any_gate = false;
  for (int r = 0; r < cell.height; ++r) {
    for (int c = 0; c < cell.width; ++c) {
      const auto& piece = cell.at(c, r);
      const PortMask mine = piece ? rotated_ports(piece->kind, piece->rotation) : 0;
      any_gate = any_gate || (piece && kind_has_gate(piece->kind));
      for (auto d : kDirections) {
        const Position n = Position{c, r}.step(d);
        const auto& other = cell.at((n.col + cell.width) % cell.width,
                                    (n.row + cell.height) % cell.height);
        const PortMask theirs = other ? rotated_ports(other->kind, other->rotation) : 0;
        if (has_port(mine, d) != has_port(theirs, opposite(d))) {
          return false;
        }
      }
    }
  }
  if (!any_gate) {
    return false;
  }
  for (int n : {2, 3}) {
    std::vector<BlockSpec> specs;
    for (int ty = 0; ty < n; ++ty) {
      for (int tx = 0; tx < n; ++tx) {
        for (int r = 0; r < cell.height; ++r) {
          for (int c = 0; c < cell.width; ++c) {
            if (const auto& p = cell.at(c, r)) {
              specs.push_back(
                  {p->kind, {tx * cell.width + c, ty * cell.height + r}, p->rotation, ""});
            }
          }
        }
      }
    }
    if (derive_movement_graph(Layout(specs), {}).num_components() != 1) {
      return false;
    }
  }
  return true;
}

TEST_CASE("1x1 cells") {
  // Ports agree, but a cell without a gate location cannot host qubits.
  CHECK_FALSE(cell_valid(single(MK::FourWayIntersection, 0)));
  CHECK(ports_match_when_tiled(single(MK::FourWayIntersection, 0)));
  CHECK_FALSE(ports_match_when_tiled(single(MK::DeadEnd, 0)));
  CHECK_FALSE(cell_valid(single(MK::DeadEnd, 0)));
  // Tiled rows of gate channels never meet.
  CHECK(ports_match_when_tiled(single(MK::GateChannel, 0)));
  CHECK_FALSE(cell_valid(single(MK::GateChannel, 0)));
}

TEST_CASE("2x2 enumeration equals the brute-force oracle") {
  std::vector<std::optional<KindRotation>> options{std::nullopt};
  for (auto kind : kMacroblockKinds) {
    for (int rot : canonical_rotations(kind)) {
      options.push_back(KindRotation{kind, rot});
    }
  }
  REQUIRE(options.size() == 18);
  std::set<std::string> expected;
  Cell cell{2, 2, std::vector<std::optional<KindRotation>>(4)};
  for (std::size_t a = 0; a < options.size(); ++a) {
    for (std::size_t b = 0; b < options.size(); ++b) {
      for (std::size_t c = 0; c < options.size(); ++c) {
        for (std::size_t d = 0; d < options.size(); ++d) {
          cell.pieces = {options[a], options[b], options[c], options[d]};
          if (oracle_valid(cell)) {
            expected.insert(cell.encoding());
          }
        }
      }
    }
  }
  std::set<std::string> got;
  for (const auto& c : enumerate_valid_cells(2, 2)) {
    got.insert(c.encoding());
  }
  CHECK(got == expected);
  CHECK(got.contains(qpos_cell().encoding()));
}

TEST_CASE("3x2 enumeration count") {
  const auto cells = enumerate_valid_cells(3, 2);
  // Frozen from the exhaustive enumeration; the published search space is
  // of the same order.
  CHECK(cells.size() == 820);
  int streamed = 0;
  for_each_valid_cell(3, 2, [&](const Cell&) { return ++streamed < 10; });
  CHECK(streamed == 10);
}

TEST_CASE("cell encoding round-trip") {
  for (const auto& c : enumerate_valid_cells(2, 2)) {
    CHECK(parse_cell(c.encoding()) == c);
  }
  CHECK_THROWS_AS(parse_cell("X4,GC0/GC1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_cell("ZZ"), std::invalid_argument);
}

TEST_CASE("tile") {
  const auto cell = qpos_cell();
  const auto once = tile(cell, 1, 1);
  CHECK(once.size() == static_cast<std::size_t>(std::count_if(
                           cell.pieces.begin(), cell.pieces.end(),
                           [](const auto& p) { return p.has_value(); })));
  for (const auto& b : once.blocks()) {
    const auto& p = cell.at(b.position.col, b.position.row);
    REQUIRE(p);
    CHECK(p->kind == b.kind);
    CHECK(p->rotation == b.rotation);
  }
  const auto four = tile(cell, 2, 2);
  CHECK(area(four) == 16);
  CHECK(four.valid());
  CHECK(derive_movement_graph(four, {}).num_components() == 1);
  for (const auto& c : enumerate_valid_cells(3, 2)) {
    const bool full = std::all_of(c.pieces.begin(), c.pieces.end(),
                                  [](const auto& p) { return p.has_value(); });
    if (full) {
      CHECK(area(tile(c, 2, 3)) == 2 * 3 * 3 * 2);
    } else {
      CHECK(area(tile(c, 2, 3)) <= 2 * 3 * 3 * 2);
    }
  }
}

TEST_CASE("systematic placement") {
  const auto cell = qpos_cell();
  SECTION("one qubit") {
    const auto layout = tile(cell, 1, 1);
    CHECK(systematic_placement(cell, {1, 1}, layout, 1) ==
          std::vector<BlockId>{layout.gate_blocks().front()});
  }
  SECTION("seven qubits on a 3x3 tiling") {
    const auto layout = tile(cell, 3, 3);
    const auto placement = systematic_placement(cell, {3, 3}, layout, 7);
    REQUIRE(placement.size() == 7);
    for (int k = 0; k < 7; ++k) {
      const auto p = layout.block(placement[static_cast<std::size_t>(k)]).position;
      CHECK(p.col / cell.width == k % 3);
      CHECK(p.row / cell.height == k / 3);
    }
  }
  SECTION("too few cells") {
    CHECK_THROWS_AS(systematic_placement(cell, {2, 2}, tile(cell, 2, 2), 5),
                    std::invalid_argument);
  }
}

TEST_CASE("random placements") {
  const auto layout = tile(qpos_cell(), 3, 3);
  CHECK(random_placements(layout, 5, 0, 1).empty());
  CHECK(random_placements(layout, 5, 8, 42) == random_placements(layout, 5, 8, 42));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (const auto& p : random_placements(layout, 1 + seed % 18, 3, seed)) {
      std::set<BlockId> distinct(p.begin(), p.end());
      CHECK(distinct.size() == p.size());
      for (BlockId b : p) {
        CHECK(layout.block(b).has_gate());
      }
    }
  }
  CHECK_THROWS_AS(random_placements(layout, 19, 1, 1), std::invalid_argument);
}

TEST_CASE("grid search") {
  const auto seq = steane_encode();
  const TechnologyParams tech;
  GridOptions options;
  options.random_placements = 3;
  const auto direct = evaluate_cell(seq, qpos_cell(), tech, options);
  const auto alone = grid_search(seq, {qpos_cell()}, tech, options);
  CHECK(alone.best_latency == direct.min_latency);
  CHECK(alone.best_cell == qpos_cell());
  auto candidates = enumerate_valid_cells(2, 2);
  candidates.resize(30);
  candidates.push_back(qpos_cell());
  const auto wider = grid_search(seq, candidates, tech, options);
  CHECK(wider.best_latency <= direct.min_latency);
}

TEST_CASE("per-cell spread on the Golay encoder") {
  GridOptions options;
  const auto stats = evaluate_cell(golay_encode(), qpos_cell(), {}, options);
  REQUIRE(stats.feasible());
  CHECK(stats.min_latency < stats.max_latency);
  CHECK(stats.min_latency <= stats.mean_latency);
  CHECK(stats.mean_latency <= stats.max_latency);
}

} // namespace
} // namespace qpnr
