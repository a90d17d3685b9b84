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
#include "oracles.hpp"
#include "qpnr/channel_grid.hpp"

#include <catch_amalgamated.hpp>

namespace qpnr {
namespace {

using MK = MacroblockKind;

TEST_CASE("macroblock kinds") {
  for (auto kind : kMacroblockKinds) {
    CHECK(kind_has_gate(kind) == (kind == MK::GateChannel || kind == MK::DeadEnd));
    CHECK(parse_kind_name(kind_name(kind)) == kind);
    for (int rot = 0; rot < 360; rot += 90) {
      const PortMask m = rotated_ports(kind, rot);
      const int n = port_count(m);
      switch (kind) {
      case MK::StraightChannel:
      case MK::GateChannel:
        CHECK(n == 2);
        CHECK((m == (port_bit(Direction::East) | port_bit(Direction::West)) ||
               m == (port_bit(Direction::North) | port_bit(Direction::South))));
        break;
      case MK::Turn:
        CHECK(n == 2);
        CHECK_FALSE(m == (port_bit(Direction::East) | port_bit(Direction::West)));
        CHECK_FALSE(m == (port_bit(Direction::North) | port_bit(Direction::South)));
        break;
      case MK::ThreeWayIntersection: CHECK(n == 3); break;
      case MK::FourWayIntersection: CHECK(n == 4); break;
      case MK::DeadEnd: CHECK(n == 1); break;
      }
      for (auto d : kDirections) {
        CHECK(has_port(rotated_ports(kind, rot + 90), rotate_cw(d)) == has_port(m, d));
      }
    }
  }
  CHECK(canonical_rotations(MK::FourWayIntersection) == std::vector<int>{0});
  CHECK(canonical_rotations(MK::StraightChannel).size() == 2);
  CHECK(canonical_rotations(MK::Turn).size() == 4);
}

TEST_CASE("technology parameters") {
  TechnologyParams tech;
  CHECK_NOTHROW(tech.validate());
  tech.t_turn = tech.t_straight;
  CHECK_THROWS_AS(tech.validate(), std::invalid_argument);
  tech = {};
  tech.t_measure = 0;
  CHECK_THROWS_AS(tech.validate(), std::invalid_argument);
}

TEST_CASE("layout construction") {
  CHECK_THROWS_AS(Layout({{MK::DeadEnd, {0, 0}, 0, ""}, {MK::DeadEnd, {0, 0}, 90, ""}}),
                  LayoutError);
  CHECK_THROWS_AS(Layout({{MK::DeadEnd, {0, 0}, 45, ""}}), LayoutError);
  CHECK_THROWS_AS(Layout({{MK::DeadEnd, {0, 0}, 0, "A"}, {MK::DeadEnd, {5, 0}, 0, "A"}}),
                  LayoutError);
  const Layout bad({{MK::StraightChannel, {0, 0}, 0, ""}, {MK::StraightChannel, {1, 0}, 90, ""}});
  CHECK_FALSE(bad.valid());
  CHECK(bad.port_mismatches().size() == 2);
  CHECK_THROWS_AS(derive_movement_graph(bad, {}), LayoutError);

  const Layout named({{MK::DeadEnd, {3, 2}, 0, ""}, {MK::GateChannel, {0, 0}, 0, "X"}});
  CHECK(named.block(0).position == Position{0, 0});
  CHECK(named.find_gate("X") == 0);
  CHECK(named.find_gate("G3_2") == 1);
  CHECK(named.gate_blocks() == std::vector<BlockId>{0, 1});
}

TEST_CASE("area") {
  CHECK(area(Layout({{MK::FourWayIntersection, {4, 4}, 0, ""}})) == 1);
  CHECK(area(Layout({{MK::DeadEnd, {0, 0}, 0, ""}, {MK::DeadEnd, {2, 1}, 0, ""}})) == 6);
  CHECK_THROWS_AS(area(Layout{}), LayoutError);
}

TEST_CASE("derive_movement_graph examples") {
  const TechnologyParams tech;
  SECTION("single dead end") {
    const auto g = derive_movement_graph(Layout({{MK::DeadEnd, {0, 0}, 0, ""}}), tech);
    CHECK(g.size() == 1);
    CHECK(g.edges().empty());
  }
  SECTION("three straight channels") {
    const Layout row({{MK::StraightChannel, {0, 0}, 0, ""},
                      {MK::StraightChannel, {1, 0}, 0, ""},
                      {MK::StraightChannel, {2, 0}, 0, ""}});
    const auto g = derive_movement_graph(row, tech);
    CHECK(g.edges().size() == 4);
    for (const auto& e : g.edges()) {
      CHECK(e.latency == tech.t_straight);
    }
    const auto p = shortest_path(g, 0, 2);
    CHECK(p.found);
    CHECK(p.hops == std::vector<BlockId>{1, 2});
    CHECK(p.latency == 2 * tech.t_straight);
  }
  SECTION("straight, turn, straight") {
    const Layout ell({{MK::StraightChannel, {0, 0}, 0, ""},
                      {MK::Turn, {1, 0}, 90, ""},
                      {MK::StraightChannel, {1, 1}, 90, ""}});
    const auto g = derive_movement_graph(ell, tech);
    CHECK(g.edges().size() == 4);
    const auto p = shortest_path(g, 0, 2);
    CHECK(p.latency == tech.t_straight + tech.t_turn);
    CHECK(p.latency > 2 * tech.t_straight);
  }
}

TEST_CASE("shortest_path examples") {
  const TechnologyParams tech;
  const Layout two({{MK::DeadEnd, {0, 0}, 0, ""},
                    {MK::DeadEnd, {1, 0}, 180, ""},
                    {MK::DeadEnd, {3, 0}, 0, ""},
                    {MK::DeadEnd, {4, 0}, 180, ""}});
  const auto g = derive_movement_graph(two, tech);
  CHECK(g.num_components() == 2);
  const auto same = shortest_path(g, 2, 2);
  CHECK(same.found);
  CHECK(same.hops.empty());
  CHECK(same.latency == 0);
  CHECK_FALSE(shortest_path(g, 0, 3).found);
  CHECK(shortest_path(g, 0, 1).latency == tech.t_straight);
  const std::vector<Time> wall{0, kUnreachable, 0, 0};
  CHECK_FALSE(shortest_path(g, 0, 1, wall).found);
}

TEST_CASE("movement graph properties on random layouts") {
  std::mt19937_64 rng(21);
  int checked = 0;
  while (checked < 60) {
    const auto layout = test::random_layout(rng, 12);
    if (!layout) {
      continue;
    }
    ++checked;
    const auto tech = test::random_tech(rng);
    const auto g = derive_movement_graph(*layout, tech);
    for (const auto& e : g.edges()) {
      CHECK(g.edge_latency(e.to, e.from) == e.latency);
    }
    const auto turned = layout->rotated(1);
    CHECK(area(turned) == area(*layout));
    const auto gt = derive_movement_graph(turned, tech);
    const auto image = [&](BlockId b) {
      const auto p = layout->block(b).position;
      return *turned.at({-p.row, p.col});
    };
    for (BlockId a = 0; a < static_cast<BlockId>(layout->size()); ++a) {
      for (BlockId b = 0; b < static_cast<BlockId>(layout->size()); ++b) {
        const auto fast = shortest_path(g, a, b);
        const auto slow = test::enumerate_shortest_path(g, a, b);
        REQUIRE(fast.found == slow.has_value());
        if (!fast.found) {
          continue;
        }
        CHECK(fast.latency == *slow);
        CHECK(path_latency(g, a, fast.hops) == fast.latency);
        CHECK(shortest_path(gt, image(a), image(b)).latency == fast.latency);
        CHECK(distances_from(g, a)[static_cast<std::size_t>(b)] == fast.latency);
      }
    }
  }
}

TEST_CASE("layout text round-trip") {
  std::mt19937_64 rng(8);
  int checked = 0;
  while (checked < 30) {
    const auto layout = test::random_layout(rng, 40);
    if (!layout) {
      continue;
    }
    ++checked;
    const auto text = write_layout(*layout);
    CHECK(write_layout(read_layout(text)) == text);
  }
  CHECK_THROWS_AS(read_layout("(0,0) Wormhole 0\n"), LayoutError);
}

TEST_CASE("connect") {
  SECTION("same row, two apart") {
    ChannelGrid grid;
    grid.add_gate({0, 0}, "A");
    grid.add_gate({2, 0}, "B");
    CHECK(connect(grid, {0, 0}, {2, 0}));
    const auto layout = grid.to_layout();
    CHECK(layout.size() == 3);
    CHECK(layout.block(*layout.at({1, 0})).kind == MK::StraightChannel);
    CHECK(connected(grid, {0, 0}, {2, 0}));
    SECTION("idempotent") {
      const auto before = write_layout(layout);
      CHECK_FALSE(connect(grid, {0, 0}, {2, 0}));
      CHECK(write_layout(grid.to_layout()) == before);
    }
  }
  SECTION("crossing an existing channel adds one four-way") {
    ChannelGrid grid;
    grid.add_gate({0, 2}, "A");
    grid.add_gate({4, 2}, "B");
    connect(grid, {0, 2}, {4, 2});
    const auto count = [](const Layout& l, MK kind) {
      return std::count_if(l.blocks().begin(), l.blocks().end(),
                           [&](const PlacedMacroblock& b) { return b.kind == kind; });
    };
    const auto before = grid.to_layout();
    CHECK(count(before, MK::FourWayIntersection) == 0);
    grid.add_gate({2, 0}, "C");
    grid.add_gate({2, 4}, "D");
    connect(grid, {2, 0}, {2, 4});
    const auto after = grid.to_layout();
    CHECK(after.valid());
    CHECK(count(after, MK::FourWayIntersection) == 1);
    CHECK(count(after, MK::StraightChannel) == count(before, MK::StraightChannel) - 1 + 2);
    CHECK(after.block(*after.at({2, 2})).kind == MK::FourWayIntersection);
  }
}

TEST_CASE("channel grid prune and inverse") {
  ChannelGrid grid;
  grid.add_gate({0, 0}, "A");
  grid.add_gate({3, 0}, "B");
  connect(grid, {0, 0}, {3, 0});
  grid.link({1, 0}, {1, 1});
  grid.link({1, 1}, {1, 2});
  grid.prune();
  CHECK_FALSE(grid.contains({1, 2}));
  CHECK_FALSE(grid.contains({1, 1}));
  const auto layout = grid.to_layout();
  CHECK(write_layout(channel_grid_from(layout).to_layout()) == write_layout(layout));
}

} // namespace
} // namespace qpnr
