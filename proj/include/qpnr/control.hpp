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

#include "qpnr/circuit.hpp"
#include "qpnr/fabric.hpp"
#include "qpnr/scheduler.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace qpnr {

/// 3-bit opcodes. The four moves name the exit port of the current block.
enum class Opcode : std::uint8_t {
  MoveNorth = 0,
  MoveEast = 1,
  MoveSouth = 2,
  MoveWest = 3,
  Gate = 4,
  Wait = 5,
  End = 6,
};

struct Command {
  Opcode op = Opcode::End;
  /// Meaningful for Opcode::Gate only.
  GateKind gate = GateKind::H;

  [[nodiscard]] static Command move(Direction d) {
    return {static_cast<Opcode>(d), GateKind::H};
  }
  [[nodiscard]] static Command gate_of(GateKind kind) { return {Opcode::Gate, kind}; }
  [[nodiscard]] static Command wait() { return {Opcode::Wait, GateKind::H}; }

  friend bool operator==(const Command& a, const Command& b) {
    return a.op == b.op && (a.op != Opcode::Gate || a.gate == b.gate);
  }
};

/// A qubit id and the commands that steer it. The terminating End is
/// implicit and never stored in `commands`.
struct ControlMessage {
  std::uint16_t qubit = 0;
  std::vector<Command> commands;
  friend bool operator==(const ControlMessage&, const ControlMessage&) = default;
};

/// Bit stream, most significant bit first: 16-bit qubit id, then 3-bit
/// opcodes (a gate opcode is followed by a 4-bit gate code), then End,
/// zero-padded to a whole byte.
[[nodiscard]] std::vector<std::uint8_t> encode(const ControlMessage& message);
/// Throws std::invalid_argument on a truncated stream, an unknown opcode or
/// gate code, or nonzero padding.
[[nodiscard]] ControlMessage decode(std::span<const std::uint8_t> bits);
/// Encoded length in bits, before padding.
[[nodiscard]] std::size_t encoded_bits(const ControlMessage& message);

/// What the first block does with a message: executes the front command
/// and forwards the rest.
[[nodiscard]] std::pair<Command, ControlMessage> pop_front(const ControlMessage& message);

struct GateOnPath {
  BlockId block = 0;
  GateKind gate = GateKind::H;
};

/// `path` starts at the qubit's current block. Gates are matched to the
/// path in order: each is issued at the first visit of its block at or
/// after the previous gate's position. Throws std::invalid_argument if two
/// consecutive path blocks are not adjacent or a gate block is not on the
/// remaining path.
[[nodiscard]] ControlMessage build_message(QubitIndex qubit,
                                           const std::vector<BlockId>& path,
                                           const std::vector<GateOnPath>& gates,
                                           const MovementGraph& graph);

/// One message per qubit covering its whole schedule: moves in hop order,
/// a wait wherever the qubit pauses between two hops outside a gate, and
/// a gate command for every instruction it takes part in.
[[nodiscard]] std::vector<ControlMessage>
messages_from_schedule(const Schedule& schedule, const InstructionSequence& seq,
                       const MovementGraph& graph);

struct Replay {
  std::vector<BlockId> visits;
  std::vector<GateOnPath> gates;
};

/// Interprets a message over the movement graph starting at `start`.
/// Throws std::invalid_argument when a move leaves through a closed port.
[[nodiscard]] Replay replay(const ControlMessage& message, BlockId start,
                            const MovementGraph& graph);

/// Block-visit sequence of one qubit in a schedule, starting block first.
[[nodiscard]] std::vector<BlockId> visit_sequence(const Schedule& schedule,
                                                  QubitIndex qubit);

} // namespace qpnr
