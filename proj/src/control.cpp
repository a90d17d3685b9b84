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

#include "qpnr/control.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <tuple>

namespace qpnr {

namespace {

constexpr int kHeaderBits = 16;
constexpr int kOpcodeBits = 3;
constexpr int kGateBits = 4;
constexpr int kGateKinds = 9;

class BitWriter {
public:
  void put(unsigned value, int width) {
    for (int i = width - 1; i >= 0; --i) {
      if (bits_ % 8 == 0) {
        bytes_.push_back(0);
      }
      if ((value >> i) & 1U) {
        bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (bits_ % 8));
      }
      ++bits_;
    }
  }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

class BitReader {
public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
  unsigned get(int width) {
    unsigned value = 0;
    for (int i = 0; i < width; ++i) {
      if (pos_ >= bytes_.size() * 8) {
        throw std::invalid_argument("control message truncated");
      }
      value = (value << 1) | ((bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1U);
      ++pos_;
    }
    return value;
  }
  [[nodiscard]] bool padding_clear() const {
    for (std::size_t p = pos_; p < bytes_.size() * 8; ++p) {
      if ((bytes_[p / 8] >> (7 - p % 8)) & 1U) {
        return false;
      }
    }
    return bytes_.size() == (pos_ + 7) / 8;
  }

private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

} // namespace

std::size_t encoded_bits(const ControlMessage& message) {
  std::size_t bits = kHeaderBits + kOpcodeBits;
  for (const auto& c : message.commands) {
    bits += kOpcodeBits + (c.op == Opcode::Gate ? kGateBits : 0);
  }
  return bits;
}

std::vector<std::uint8_t> encode(const ControlMessage& message) {
  BitWriter out;
  out.put(message.qubit, kHeaderBits);
  for (const auto& c : message.commands) {
    if (c.op == Opcode::End) {
      throw std::invalid_argument("End is implicit in a control message");
    }
    out.put(static_cast<unsigned>(c.op), kOpcodeBits);
    if (c.op == Opcode::Gate) {
      out.put(static_cast<unsigned>(c.gate), kGateBits);
    }
  }
  out.put(static_cast<unsigned>(Opcode::End), kOpcodeBits);
  return out.take();
}

ControlMessage decode(std::span<const std::uint8_t> bits) {
  BitReader in(bits);
  ControlMessage message;
  message.qubit = static_cast<std::uint16_t>(in.get(kHeaderBits));
  while (true) {
    const unsigned op = in.get(kOpcodeBits);
    if (op == static_cast<unsigned>(Opcode::End)) {
      break;
    }
    if (op > static_cast<unsigned>(Opcode::End)) {
      throw std::invalid_argument("unknown control opcode " + std::to_string(op));
    }
    Command c{static_cast<Opcode>(op), GateKind::H};
    if (c.op == Opcode::Gate) {
      const unsigned code = in.get(kGateBits);
      if (code >= kGateKinds) {
        throw std::invalid_argument("unknown gate code " + std::to_string(code));
      }
      c.gate = static_cast<GateKind>(code);
    }
    message.commands.push_back(c);
  }
  if (!in.padding_clear()) {
    throw std::invalid_argument("control message has trailing bits");
  }
  return message;
}

std::pair<Command, ControlMessage> pop_front(const ControlMessage& message) {
  if (message.commands.empty()) {
    return {Command{}, message};
  }
  ControlMessage rest{message.qubit,
                      {message.commands.begin() + 1, message.commands.end()}};
  return {message.commands.front(), std::move(rest)};
}

ControlMessage build_message(QubitIndex qubit, const std::vector<BlockId>& path,
                             const std::vector<GateOnPath>& gates,
                             const MovementGraph& graph) {
  if (path.empty()) {
    throw std::invalid_argument("control path needs a starting block");
  }
  ControlMessage message{static_cast<std::uint16_t>(qubit), {}};
  std::size_t next_gate = 0;
  auto issue_gates = [&](BlockId at) {
    while (next_gate < gates.size() && gates[next_gate].block == at) {
      message.commands.push_back(Command::gate_of(gates[next_gate].gate));
      ++next_gate;
    }
  };
  issue_gates(path.front());
  for (std::size_t i = 1; i < path.size(); ++i) {
    const auto d = graph.direction_between(path[i - 1], path[i]);
    if (!d) {
      throw std::invalid_argument("control path blocks " + std::to_string(path[i - 1]) +
                                  " and " + std::to_string(path[i]) +
                                  " are not adjacent");
    }
    message.commands.push_back(Command::move(*d));
    issue_gates(path[i]);
  }
  if (next_gate != gates.size()) {
    throw std::invalid_argument("gate block " + std::to_string(gates[next_gate].block) +
                                " is not on the control path");
  }
  return message;
}

std::vector<ControlMessage> messages_from_schedule(const Schedule& schedule,
                                                   const InstructionSequence& seq,
                                                   const MovementGraph& graph) {
  const std::size_t qubits = schedule.initial.size();
  // (start, end, kind, index): kind 0 is a hop, 1 a gate.
  std::vector<std::vector<std::tuple<Time, Time, int, std::size_t>>> events(qubits);
  for (std::size_t h = 0; h < schedule.hops.size(); ++h) {
    const auto& hop = schedule.hops[h];
    events.at(static_cast<std::size_t>(hop.qubit)).emplace_back(hop.start, hop.end, 0, h);
  }
  for (std::size_t g = 0; g < schedule.gates.size(); ++g) {
    for (QubitIndex q : schedule.gates[g].qubits) {
      events.at(static_cast<std::size_t>(q))
          .emplace_back(schedule.gates[g].start, schedule.gates[g].end, 1, g);
    }
  }
  std::vector<ControlMessage> out;
  for (std::size_t q = 0; q < qubits; ++q) {
    std::sort(events[q].begin(), events[q].end());
    ControlMessage message{static_cast<std::uint16_t>(q), {}};
    Time free_at = 0;
    for (const auto& [start, end, kind, index] : events[q]) {
      if (kind == 1) {
        message.commands.push_back(
            Command::gate_of(seq[schedule.gates[index].instruction].gate));
      } else {
        const auto& hop = schedule.hops[index];
        if (start > free_at) {
          message.commands.push_back(Command::wait());
        }
        const auto d = graph.direction_between(hop.from, hop.to);
        if (!d) {
          throw std::invalid_argument("scheduled hop between non-adjacent blocks");
        }
        message.commands.push_back(Command::move(*d));
      }
      free_at = end;
    }
    out.push_back(std::move(message));
  }
  return out;
}

Replay replay(const ControlMessage& message, BlockId start,
              const MovementGraph& graph) {
  Replay out;
  out.visits.push_back(start);
  BlockId at = start;
  for (const auto& command : message.commands) {
    switch (command.op) {
    case Opcode::MoveNorth:
    case Opcode::MoveEast:
    case Opcode::MoveSouth:
    case Opcode::MoveWest: {
      const BlockId next = graph.neighbor(at, static_cast<Direction>(command.op));
      if (next == MovementGraph::kNone) {
        throw std::invalid_argument("control message leaves block " +
                                    std::to_string(at) + " through a closed port");
      }
      at = next;
      out.visits.push_back(at);
      break;
    }
    case Opcode::Gate:
      out.gates.push_back({at, command.gate});
      break;
    case Opcode::Wait:
    case Opcode::End:
      break;
    }
  }
  return out;
}

std::vector<BlockId> visit_sequence(const Schedule& schedule, QubitIndex qubit) {
  std::vector<const HopEvent*> hops;
  for (const auto& h : schedule.hops) {
    if (h.qubit == qubit) {
      hops.push_back(&h);
    }
  }
  std::stable_sort(hops.begin(), hops.end(), [](const HopEvent* a, const HopEvent* b) {
    return a->start < b->start;
  });
  std::vector<BlockId> out{schedule.initial.at(static_cast<std::size_t>(qubit))};
  for (const HopEvent* h : hops) {
    out.push_back(h->to);
  }
  return out;
}

} // namespace qpnr
