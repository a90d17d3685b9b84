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

#pragma once

#include "qpnr/control.hpp"
#include "qpnr/fabric.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qpnr {

/// A controller template from hdl/, compiled into the library.
struct HdlTemplate {
  std::string_view file;
  std::string_view text;
};
/// All templates, sorted by file name.
[[nodiscard]] const std::vector<HdlTemplate>& hdl_templates();

/// Controller module of a macroblock kind, e.g. mb_gate_channel.
[[nodiscard]] std::string_view controller_module(MacroblockKind kind);

struct Connection {
  std::string port;
  /// A declared net, a bit of one (`laser_req[2]`), a constant (`1'b0`),
  /// or empty for an unconnected output.
  std::string net;
  friend bool operator==(const Connection&, const Connection&) = default;
};

struct ControllerInstance {
  std::string module;
  std::string name;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<Connection> connections;
  /// Set for macroblock controllers.
  std::optional<BlockId> block;
  Position position;
  int dest_id = -1;
  bool gate = false;

  [[nodiscard]] const Connection* find(std::string_view port) const;
};

struct Net {
  std::string name;
  int width = 1;
};

/// Two facing open sides of adjacent blocks.
struct PortPair {
  std::size_t first = 0;
  Direction side = Direction::East;
  std::size_t second = 0;
};

struct ControlNetlist {
  std::vector<ControllerInstance> instances;
  std::vector<Net> nets;
  /// Instance indices of facing sides.
  std::vector<PortPair> interior_ports;
};

/// One controller per block (named mb_c<col>_r<row>, destination id = block
/// id) plus issue logic and the laser controller. Adjacent open sides get a
/// request and an available wire in each direction; every gate-capable
/// block gets one laser request/grant bit. Throws LayoutError on an invalid
/// layout.
[[nodiscard]] ControlNetlist emit_netlist(const Layout& layout,
                                          std::size_t rom_depth = 1);

/// Structural Verilog-2001 for the top module `control_top`.
[[nodiscard]] std::string netlist_text(const ControlNetlist& netlist);

/// Violations found; empty when clean.
[[nodiscard]] std::vector<std::string> lint_netlist(const ControlNetlist& netlist);

/// Words of the control ROM: {valid, destination id, message byte}, the
/// messages in the given order, each sent to its qubit's starting block.
struct RomWord {
  std::uint16_t dest = 0;
  std::uint8_t byte = 0;
  friend bool operator==(const RomWord&, const RomWord&) = default;
};
[[nodiscard]] std::vector<RomWord> control_rom(const std::vector<ControlMessage>& messages,
                                               const std::vector<BlockId>& start);
/// Verilog module `control_rom` holding the words.
[[nodiscard]] std::string control_rom_text(const std::vector<RomWord>& words);

/// Messages in schedule order: by the time of each qubit's first event,
/// then qubit index.
[[nodiscard]] std::vector<ControlMessage> order_messages(std::vector<ControlMessage> messages,
                                                         const Schedule& schedule);

} // namespace qpnr
