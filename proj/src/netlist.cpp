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

#include "qpnr/netlist.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qpnr {

namespace {

constexpr std::array<const char*, 4> kSide{"n", "e", "s", "w"};

std::string coord(int v) { return v < 0 ? "m" + std::to_string(-v) : std::to_string(v); }

std::string tag(Position p) { return "c" + coord(p.col) + "_r" + coord(p.row); }

std::string where(Position p) {
  return "(" + std::to_string(p.col) + "," + std::to_string(p.row) + ")";
}

std::string side_port(const char* base, Direction d) {
  return std::string(base) + "_" + kSide[static_cast<std::size_t>(d)];
}

bool is_constant(const std::string& net) { return net.find('\'') != std::string::npos; }

std::string base_net(const std::string& net) { return net.substr(0, net.find('[')); }

std::string bit_of(const std::string& net) {
  const auto open = net.find('[');
  return open == std::string::npos ? std::string() : net.substr(open);
}

} // namespace

std::string_view controller_module(MacroblockKind kind) {
  switch (kind) {
  case MacroblockKind::StraightChannel:
    return "mb_straight_channel";
  case MacroblockKind::GateChannel:
    return "mb_gate_channel";
  case MacroblockKind::Turn:
    return "mb_turn";
  case MacroblockKind::ThreeWayIntersection:
    return "mb_three_way";
  case MacroblockKind::FourWayIntersection:
    return "mb_four_way";
  case MacroblockKind::DeadEnd:
    return "mb_dead_end";
  }
  throw std::invalid_argument("unknown macroblock kind");
}

const Connection* ControllerInstance::find(std::string_view port) const {
  for (const auto& c : connections) {
    if (c.port == port) {
      return &c;
    }
  }
  return nullptr;
}

ControlNetlist emit_netlist(const Layout& layout, std::size_t rom_depth) {
  const auto graph = derive_movement_graph(layout, TechnologyParams{});
  const auto& blocks = layout.blocks();
  const std::size_t lasers = layout.gate_blocks().size();
  const std::string width_n = std::to_string(std::max<std::size_t>(1, lasers));

  ControlNetlist out;
  out.nets = {{"bus_dest", 16}, {"bus_data", 8}, {"bus_valid", 1}};
  if (lasers > 0) {
    out.nets.push_back({"laser_req", static_cast<int>(lasers)});
    out.nets.push_back({"laser_grant", static_cast<int>(lasers)});
  }
  const std::vector<Connection> common{{"clk", "clk"},
                                       {"rst", "rst"},
                                       {"bus_dest", "bus_dest"},
                                       {"bus_data", "bus_data"},
                                       {"bus_valid", "bus_valid"}};

  ControllerInstance issue;
  issue.module = "issue_logic";
  issue.name = "u_issue";
  issue.parameters = {{"ROM_DEPTH", std::to_string(std::max<std::size_t>(1, rom_depth))}};
  issue.connections = common;
  out.instances.push_back(std::move(issue));

  ControllerInstance laser;
  laser.module = "laser_controller";
  laser.name = "u_laser";
  laser.parameters = {{"N", width_n}};
  laser.connections = {{"clk", "clk"},
                       {"rst", "rst"},
                       {"req", lasers > 0 ? "laser_req" : "1'b0"},
                       {"grant", lasers > 0 ? "laser_grant" : ""}};
  out.instances.push_back(std::move(laser));

  constexpr std::size_t kFirstBlock = 2;
  int laser_bit = 0;
  for (const auto& b : blocks) {
    ControllerInstance inst;
    inst.module = std::string(controller_module(b.kind));
    inst.name = "mb_" + tag(b.position);
    inst.parameters = {{"DEST_ID", std::to_string(b.id)},
                       {"ROTATION", std::to_string(b.rotation)}};
    inst.connections = common;
    inst.block = b.id;
    inst.position = b.position;
    inst.dest_id = b.id;
    inst.gate = b.has_gate();
    for (auto d : kDirections) {
      const BlockId n = graph.neighbor(b.id, d);
      if (n == MovementGraph::kNone) {
        inst.connections.push_back({side_port("req_out", d), ""});
        inst.connections.push_back({side_port("avail_in", d), "1'b0"});
        inst.connections.push_back({side_port("req_in", d), "1'b0"});
        inst.connections.push_back({side_port("avail_out", d), ""});
        continue;
      }
      const std::string self = tag(b.position);
      const std::string other = tag(layout.block(n).position);
      inst.connections.push_back({side_port("req_out", d), "req_" + self + "_to_" + other});
      inst.connections.push_back({side_port("avail_in", d), "avail_" + other + "_to_" + self});
      inst.connections.push_back({side_port("req_in", d), "req_" + other + "_to_" + self});
      inst.connections.push_back({side_port("avail_out", d), "avail_" + self + "_to_" + other});
      out.nets.push_back({"req_" + self + "_to_" + other, 1});
      out.nets.push_back({"avail_" + self + "_to_" + other, 1});
      if (d == Direction::East || d == Direction::South) {
        out.interior_ports.push_back({kFirstBlock + static_cast<std::size_t>(b.id), d,
                                      kFirstBlock + static_cast<std::size_t>(n)});
      }
    }
    if (inst.gate) {
      const std::string bit = "[" + std::to_string(laser_bit++) + "]";
      inst.connections.push_back({"laser_req", "laser_req" + bit});
      inst.connections.push_back({"laser_grant", "laser_grant" + bit});
    }
    out.instances.push_back(std::move(inst));
  }
  return out;
}

std::string netlist_text(const ControlNetlist& netlist) {
  std::ostringstream os;
  os << "// Generated by qpnr: structural control netlist.\n"
     << "module control_top (\n  input wire clk,\n  input wire rst\n);\n";
  for (const auto& net : netlist.nets) {
    os << "  wire ";
    if (net.width > 1) {
      os << "[" << net.width - 1 << ":0] ";
    }
    os << net.name << ";\n";
  }
  for (const auto& inst : netlist.instances) {
    os << "\n  " << inst.module;
    if (!inst.parameters.empty()) {
      os << " #(";
      for (std::size_t i = 0; i < inst.parameters.size(); ++i) {
        os << (i ? ", " : "") << "." << inst.parameters[i].first << "("
           << inst.parameters[i].second << ")";
      }
      os << ")";
    }
    os << " " << inst.name << " (\n";
    for (std::size_t i = 0; i < inst.connections.size(); ++i) {
      const auto& c = inst.connections[i];
      os << "    ." << c.port << "(" << c.net << ")"
         << (i + 1 < inst.connections.size() ? "," : "") << "\n";
    }
    os << "  );\n";
  }
  os << "endmodule\n";
  return os.str();
}

std::vector<std::string> lint_netlist(const ControlNetlist& netlist) {
  std::vector<std::string> out;
  const auto& insts = netlist.instances;
  std::map<int, std::size_t> ids;
  std::set<std::string> names;
  for (std::size_t i = 0; i < insts.size(); ++i) {
    const auto& inst = insts[i];
    if (!names.insert(inst.name).second) {
      out.push_back("duplicate instance name " + inst.name);
    }
    if (inst.dest_id >= 0 && !ids.emplace(inst.dest_id, i).second) {
      out.push_back("duplicate destination id " + std::to_string(inst.dest_id) + " at " +
                    where(inst.position));
    }
  }

  for (const auto& pair : netlist.interior_ports) {
    if (pair.first >= insts.size() || pair.second >= insts.size()) {
      out.push_back("interior port refers to a missing instance");
      continue;
    }
    const auto& a = insts[pair.first];
    const auto& b = insts[pair.second];
    const Direction sa = pair.side;
    const Direction sb = opposite(sa);
    auto wired = [](const ControllerInstance& from, std::string out_port,
                    const ControllerInstance& to, std::string in_port) {
      const auto* o = from.find(out_port);
      const auto* i = to.find(in_port);
      return o != nullptr && i != nullptr && !o->net.empty() && !is_constant(o->net) &&
             o->net == i->net;
    };
    const bool ok = wired(a, side_port("req_out", sa), b, side_port("req_in", sb)) &&
                    wired(b, side_port("req_out", sb), a, side_port("req_in", sa)) &&
                    wired(a, side_port("avail_out", sa), b, side_port("avail_in", sb)) &&
                    wired(b, side_port("avail_out", sb), a, side_port("avail_in", sa));
    if (!ok) {
      out.push_back("unwired interior port at " + where(a.position) + " side " +
                    kSide[static_cast<std::size_t>(sa)]);
    }
  }

  std::map<std::string, int> endpoints;
  for (const auto& net : netlist.nets) {
    endpoints[net.name] = 0;
  }
  for (const auto& inst : insts) {
    for (const auto& c : inst.connections) {
      if (c.net.empty() || is_constant(c.net) || c.net == "clk" || c.net == "rst") {
        continue;
      }
      auto it = endpoints.find(base_net(c.net));
      if (it == endpoints.end()) {
        out.push_back("undeclared net " + c.net + " on " + inst.name);
      } else {
        ++it->second;
      }
    }
  }
  for (const auto& [name, count] : endpoints) {
    if (count < 2) {
      out.push_back("dangling net " + name);
    }
  }

  const ControllerInstance* laser = nullptr;
  for (const auto& inst : insts) {
    if (inst.module == "laser_controller") {
      laser = &inst;
    }
  }
  std::set<std::string> bits;
  for (const auto& inst : insts) {
    if (!inst.gate) {
      continue;
    }
    const auto* req = inst.find("laser_req");
    const auto* grant = inst.find("laser_grant");
    const bool ok = laser != nullptr && req != nullptr && grant != nullptr &&
                    base_net(req->net) == "laser_req" &&
                    base_net(grant->net) == "laser_grant" &&
                    !bit_of(req->net).empty() && bit_of(req->net) == bit_of(grant->net) &&
                    laser->find("req") != nullptr && laser->find("req")->net == "laser_req" &&
                    bits.insert(req->net).second;
    if (!ok) {
      out.push_back("gate block at " + where(inst.position) +
                    " is not wired to the laser controller");
    }
  }
  return out;
}

std::vector<RomWord> control_rom(const std::vector<ControlMessage>& messages,
                                 const std::vector<BlockId>& start) {
  std::vector<RomWord> out;
  for (const auto& m : messages) {
    const auto dest = static_cast<std::uint16_t>(start.at(m.qubit));
    for (std::uint8_t byte : encode(m)) {
      out.push_back({dest, byte});
    }
  }
  if (out.size() > 0xFFFF) {
    throw std::length_error("control ROM exceeds 65535 words");
  }
  return out;
}

std::string control_rom_text(const std::vector<RomWord>& words) {
  std::ostringstream os;
  os << "// Generated by qpnr: control message ROM, {valid, dest, byte}.\n"
     << "module control_rom (\n  input wire [15:0] addr,\n  output reg [24:0] word\n);\n"
     << "  always @(*) begin\n    case (addr)\n";
  for (std::size_t i = 0; i < words.size(); ++i) {
    os << "      16'd" << i << ": word = {1'b1, 16'd" << words[i].dest << ", 8'd"
       << static_cast<int>(words[i].byte) << "};\n";
  }
  os << "      default: word = 25'd0;\n    endcase\n  end\nendmodule\n";
  return os.str();
}

std::vector<ControlMessage> order_messages(std::vector<ControlMessage> messages,
                                           const Schedule& schedule) {
  std::map<int, Time> first;
  for (const auto& h : schedule.hops) {
    auto [it, fresh] = first.emplace(h.qubit, h.start);
    it->second = std::min(it->second, h.start);
  }
  for (const auto& g : schedule.gates) {
    for (QubitIndex q : g.qubits) {
      auto [it, fresh] = first.emplace(q, g.start);
      it->second = std::min(it->second, g.start);
    }
  }
  auto key = [&](const ControlMessage& m) {
    const auto it = first.find(m.qubit);
    return std::make_pair(it == first.end() ? kUnreachable : it->second, m.qubit);
  };
  std::stable_sort(messages.begin(), messages.end(),
                   [&](const ControlMessage& a, const ControlMessage& b) {
                     return key(a) < key(b);
                   });
  return messages;
}

} // namespace qpnr
