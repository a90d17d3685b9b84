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
#include "qpnr/control.hpp"
#include "qpnr/grid.hpp"
#include "qpnr/netlist.hpp"

#include <catch_amalgamated.hpp>

namespace qpnr {
namespace {

using MK = MacroblockKind;

ControlMessage random_message(std::mt19937_64& rng) {
  ControlMessage m;
  m.qubit = static_cast<std::uint16_t>(rng());
  const std::size_t n = rng() % 40;
  for (std::size_t i = 0; i < n; ++i) {
    switch (rng() % 3) {
    case 0: m.commands.push_back(Command::move(kDirections[rng() % 4])); break;
    case 1: m.commands.push_back(Command::gate_of(static_cast<GateKind>(rng() % 9))); break;
    default: m.commands.push_back(Command::wait()); break;
    }
  }
  return m;
}

const Layout& row4() {
  static const Layout l({{MK::DeadEnd, {0, 0}, 0, "M0"},
                         {MK::StraightChannel, {1, 0}, 0, ""},
                         {MK::StraightChannel, {2, 0}, 0, ""},
                         {MK::DeadEnd, {3, 0}, 180, "M3"}});
  return l;
}

TEST_CASE("build_message") {
  const auto g = derive_movement_graph(row4(), {});
  SECTION("three moves then CNOT") {
    const auto m = build_message(5, {0, 1, 2, 3}, {{3, GateKind::CX}}, g);
    CHECK(m.qubit == 5);
    const auto east = Command::move(Direction::East);
    CHECK(m.commands == std::vector<Command>{east, east, east, Command::gate_of(GateKind::CX)});
  }
  SECTION("gate in place") {
    const auto m = build_message(0, {3}, {{3, GateKind::H}}, g);
    CHECK(m.commands == std::vector<Command>{Command::gate_of(GateKind::H)});
  }
  SECTION("errors") {
    CHECK_THROWS_AS(build_message(0, {0, 2}, {}, g), std::invalid_argument);
    CHECK_THROWS_AS(build_message(0, {0, 1}, {{3, GateKind::H}}, g), std::invalid_argument);
  }
}

TEST_CASE("message encoding") {
  SECTION("layout of the bit stream") {
    const ControlMessage m{0x1234, {Command::move(Direction::South), Command::gate_of(GateKind::CZ)}};
    // 0x1234, 010, 100 1000, 110, then 3 zero bits.
    CHECK(encoded_bits(m) == 16 + 3 + 7 + 3);
    CHECK(encode(m) == std::vector<std::uint8_t>{0x12, 0x34, 0b01010010, 0b00110000});
  }
  SECTION("round-trip") {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 500; ++trial) {
      const auto m = random_message(rng);
      const auto bytes = encode(m);
      CHECK(bytes.size() == (encoded_bits(m) + 7) / 8);
      CHECK(decode(bytes) == m);
    }
  }
  SECTION("malformed streams") {
    const ControlMessage m{7, {Command::move(Direction::West)}};
    auto bytes = encode(m);
    CHECK_THROWS_AS(decode(std::vector<std::uint8_t>(bytes.begin(), bytes.end() - 1)),
                    std::invalid_argument);
    auto extra = bytes;
    extra.push_back(0);
    CHECK_THROWS_AS(decode(extra), std::invalid_argument);
    auto padded = bytes;
    padded.back() |= 1;
    CHECK_THROWS_AS(decode(padded), std::invalid_argument);
    // Opcode 7 does not exist.
    CHECK_THROWS_AS(decode(std::vector<std::uint8_t>{0, 0, 0b11100000}), std::invalid_argument);
    // Gate code 15 does not exist.
    CHECK_THROWS_AS(decode(std::vector<std::uint8_t>{0, 0, 0b10011111, 0b11000000}),
                    std::invalid_argument);
  }
}

TEST_CASE("each block consumes the front command") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    auto m = random_message(rng);
    const auto original = m;
    std::vector<Command> seen;
    while (!m.commands.empty()) {
      const auto [front, rest] = pop_front(m);
      seen.push_back(front);
      CHECK(rest.qubit == m.qubit);
      CHECK(encoded_bits(rest) < encoded_bits(m));
      m = rest;
    }
    CHECK(seen == original.commands);
  }
}

TEST_CASE("replay reproduces scheduled visits") {
  std::mt19937_64 rng(6);
  const auto cell = qpos_cell();
  const TechnologyParams tech;
  for (int trial = 0; trial < 25; ++trial) {
    const auto seq = test::random_circuit(rng, 2 + trial % 5, 4 + trial % 20);
    const auto tiling = tiling_for(seq.num_qubits());
    const auto layout = tile(cell, tiling.nx, tiling.ny);
    const auto graph = derive_movement_graph(layout, tech);
    const auto initial = systematic_placement(cell, tiling, layout, seq.num_qubits());
    const auto result = schedule(seq, layout, graph, initial,
                                 critical_path_priorities(build_dataflow(seq), seq, tech),
                                 std::nullopt);
    REQUIRE(std::holds_alternative<Schedule>(result));
    const auto& s = std::get<Schedule>(result);
    const auto messages = messages_from_schedule(s, seq, graph);
    REQUIRE(messages.size() == seq.num_qubits());
    for (const auto& m : messages) {
      const auto r = replay(decode(encode(m)), s.initial[m.qubit], graph);
      CHECK(r.visits == visit_sequence(s, m.qubit));
      std::vector<const GateEvent*> mine;
      for (const auto& gate : s.gates) {
        if (std::find(gate.qubits.begin(), gate.qubits.end(), m.qubit) != gate.qubits.end()) {
          mine.push_back(&gate);
        }
      }
      std::sort(mine.begin(), mine.end(),
                [](const GateEvent* a, const GateEvent* b) { return a->start < b->start; });
      REQUIRE(r.gates.size() == mine.size());
      for (std::size_t k = 0; k < mine.size(); ++k) {
        CHECK(r.gates[k].block == mine[k]->block);
        CHECK(r.gates[k].gate == seq[mine[k]->instruction].gate);
      }
    }
  }
  const auto g = derive_movement_graph(row4(), {});
  CHECK_THROWS_AS(replay({0, {Command::move(Direction::North)}}, 0, g), std::invalid_argument);
}

long handshake_nets(const ControlNetlist& n) {
  return std::count_if(n.nets.begin(), n.nets.end(), [](const Net& net) {
    return net.name.starts_with("req_") || net.name.starts_with("avail_");
  });
}

TEST_CASE("emit_netlist examples") {
  SECTION("single dead end") {
    const auto n = emit_netlist(Layout({{MK::DeadEnd, {0, 0}, 0, "A"}}));
    CHECK(n.instances.size() == 3);
    CHECK(n.interior_ports.empty());
    CHECK(handshake_nets(n) == 0);
    CHECK(lint_netlist(n).empty());
  }
  SECTION("two straight channels") {
    const auto n = emit_netlist(Layout({{MK::StraightChannel, {0, 0}, 0, ""},
                                        {MK::StraightChannel, {1, 0}, 0, ""}}));
    CHECK(n.instances.size() == 4);
    CHECK(n.interior_ports.size() == 1);
    CHECK(handshake_nets(n) == 4);
    CHECK(lint_netlist(n).empty());
  }
}

TEST_CASE("netlists of random layouts") {
  std::mt19937_64 rng(9);
  int checked = 0;
  while (checked < 40) {
    const auto layout = test::random_layout(rng, 60);
    if (!layout) {
      continue;
    }
    ++checked;
    const auto n = emit_netlist(*layout);
    CHECK(n.instances.size() == layout->size() + 2);
    CHECK(lint_netlist(n).empty());
    CHECK(netlist_text(emit_netlist(*layout)) == netlist_text(n));
    std::size_t pairs = 0;
    for (const auto& b : layout->blocks()) {
      for (auto d : {Direction::East, Direction::South}) {
        const auto other = layout->at(b.position.step(d));
        pairs += other && has_port(b.ports(), d) ? 1 : 0;
      }
    }
    CHECK(n.interior_ports.size() == pairs);
    std::set<int> ids;
    for (const auto& inst : n.instances) {
      if (inst.block) {
        CHECK(inst.dest_id == *inst.block);
        CHECK(ids.insert(inst.dest_id).second);
      }
    }
  }
}

TEST_CASE("lint finds corruptions") {
  const Layout l({{MK::DeadEnd, {0, 0}, 0, "A"},
                  {MK::StraightChannel, {1, 0}, 0, ""},
                  {MK::DeadEnd, {2, 0}, 180, "B"}});
  const auto clean = emit_netlist(l);
  REQUIRE(lint_netlist(clean).empty());
  SECTION("duplicate destination id") {
    auto n = clean;
    n.instances[3].dest_id = n.instances[2].dest_id;
    const auto report = lint_netlist(n);
    REQUIRE(report.size() == 1);
    CHECK(report[0].find("duplicate destination id") != std::string::npos);
  }
  SECTION("unwired interior port") {
    auto n = clean;
    for (auto& c : n.instances[3].connections) {
      if (c.port == "req_in_w") {
        c.net = "1'b0";
      }
    }
    const auto report = lint_netlist(n);
    CHECK(std::any_of(report.begin(), report.end(), [](const std::string& v) {
      return v.find("unwired interior port at (0,0) side e") != std::string::npos;
    }));
  }
  SECTION("missing laser bit") {
    auto n = clean;
    for (auto& c : n.instances[2].connections) {
      if (c.port == "laser_req") {
        c.net = "";
      }
    }
    CHECK_FALSE(lint_netlist(n).empty());
  }
}

TEST_CASE("HDL text") {
  for (auto kind : kMacroblockKinds) {
    const auto module = controller_module(kind);
    const auto& all = hdl_templates();
    const bool found = std::any_of(all.begin(), all.end(), [&](const HdlTemplate& t) {
      return t.text.find("module " + std::string(module)) != std::string_view::npos;
    });
    CHECK(found);
  }
  const auto n = emit_netlist(row4(), 4);
  const auto text = netlist_text(n);
  CHECK(text.find("module control_top") != std::string::npos);
  for (const auto& inst : n.instances) {
    CHECK(text.find(inst.name) != std::string::npos);
  }
}

TEST_CASE("control ROM") {
  const auto g = derive_movement_graph(row4(), {});
  const std::vector<ControlMessage> messages{build_message(0, {0, 1, 2, 3}, {{3, GateKind::H}}, g),
                                             build_message(1, {3}, {{3, GateKind::X}}, g)};
  const std::vector<BlockId> start{0, 3};
  const auto rom = control_rom(messages, start);
  CHECK(rom.size() == encode(messages[0]).size() + encode(messages[1]).size());
  CHECK(rom.front().dest == 0);
  CHECK(rom.back().dest == 3);
  CHECK(control_rom_text(rom).find("module control_rom") != std::string::npos);
}

} // namespace
} // namespace qpnr
