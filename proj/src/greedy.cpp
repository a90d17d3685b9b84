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

#include "qpnr/greedy.hpp"

#include <algorithm>

namespace qpnr {

namespace {

std::size_t nearest(const std::vector<Position>& from, Position to) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < from.size(); ++i) {
    if (manhattan(from[i], to) < manhattan(from[best], to)) {
      best = i;
    }
  }
  return best;
}

} // namespace

std::vector<Position> spiral_positions(std::size_t n, int spacing) {
  std::vector<Position> out;
  if (n > 0) {
    out.push_back({0, 0});
  }
  for (int r = 1; out.size() < n; ++r) {
    std::vector<Position> ring;
    for (int c = -r; c <= r; ++c) {
      ring.push_back({c, -r});
    }
    for (int row = -r + 1; row <= r; ++row) {
      ring.push_back({r, row});
    }
    for (int c = r - 1; c >= -r; --c) {
      ring.push_back({c, r});
    }
    for (int row = r - 1; row > -r; --row) {
      ring.push_back({-r, row});
    }
    std::rotate(ring.begin(), ring.begin() + 3 * r, ring.end());
    for (const auto& p : ring) {
      if (out.size() == n) {
        break;
      }
      out.push_back(p);
    }
  }
  for (auto& p : out) {
    p = {p.col * spacing, p.row * spacing};
  }
  return out;
}

GreedyResult greedy_layout(const InstructionSequence& seq,
                           const TechnologyParams& tech,
                           const GreedyOptions& options) {
  if (seq.empty()) {
    throw std::invalid_argument("greedy layout of an empty circuit");
  }
  const std::size_t nq = seq.num_qubits();
  const int cap = options.max_iterations > 0
                      ? options.max_iterations
                      : 10 * static_cast<int>(seq.size());
  const auto priorities = critical_path_priorities(build_dataflow(seq), seq, tech);

  // Spare gates take the free spiral slot nearest the congestion among the
  // first few still free.
  constexpr std::size_t kSpareWindow = 8;
  auto slots = spiral_positions(nq + kSpareWindow, options.spacing);
  ChannelGrid grid;
  std::vector<Position> home;
  for (std::size_t q = 0; q < nq; ++q) {
    grid.add_gate(slots[q]);
    home.push_back(slots[q]);
  }

  GreedyResult result;
  DeadlockReport last;
  for (int iter = 1; iter <= cap; ++iter) {
    result.iterations = iter;
    Layout layout = grid.to_layout();
    const auto graph = derive_movement_graph(layout, tech);
    std::vector<BlockId> initial;
    for (const auto& p : home) {
      initial.push_back(*layout.at(p));
    }
    auto run = schedule(seq, layout, graph, initial, priorities, std::nullopt,
                        options.scheduler);
    if (auto* done = std::get_if<Schedule>(&run)) {
      result.layout = std::move(layout);
      result.initial = std::move(initial);
      result.schedule = std::move(*done);
      return result;
    }
    last = std::get<DeadlockReport>(run);
    const auto label = graph.component_labels();
    auto comp_of = [&](QubitIndex q) {
      return label[static_cast<std::size_t>(last.qubit_positions[static_cast<std::size_t>(q)])];
    };
    auto stranded = [&](InstrId i) {
      const auto& ops = seq[i].operands;
      return ops.size() == 2 && comp_of(ops[0]) != comp_of(ops[1]);
    };
    // Prefer the reported instruction, then the most urgent stranded one.
    std::optional<InstrId> pick;
    if (last.blocked_instruction >= 0 && stranded(last.blocked_instruction)) {
      pick = last.blocked_instruction;
    }
    if (!pick) {
      for (InstrId i = 0; i < static_cast<InstrId>(seq.size()); ++i) {
        if (stranded(i) &&
            (!pick || priorities[static_cast<std::size_t>(i)] >
                          priorities[static_cast<std::size_t>(*pick)])) {
          pick = i;
        }
      }
    }
    auto gates_in = [&](int comp) {
      std::vector<Position> out;
      for (BlockId b : layout.gate_blocks()) {
        if (label[static_cast<std::size_t>(b)] == comp) {
          out.push_back(layout.block(b).position);
        }
      }
      return out;
    };
    if (pick) {
      const auto& ops = seq[*pick].operands;
      const auto ga = gates_in(comp_of(ops[0]));
      const auto gb = gates_in(comp_of(ops[1]));
      std::pair<Position, Position> best{ga.front(), gb.front()};
      for (const auto& a : ga) {
        for (const auto& b : gb) {
          if (manhattan(a, b) < manhattan(best.first, best.second)) {
            best = {a, b};
          }
        }
      }
      result.connections += connect(grid, best.first, best.second) ? 1 : 0;
      continue;
    }
    // Congestion inside one component: add a parking gate close to the
    // blocked operands.
    if (last.blocked_instruction < 0) {
      break;
    }
    const QubitIndex q0 = seq[last.blocked_instruction].operands.front();
    const Position at =
        layout.block(last.qubit_positions[static_cast<std::size_t>(q0)]).position;
    std::vector<std::size_t> free_slots;
    for (std::size_t s = 0; free_slots.size() < kSpareWindow; ++s) {
      if (s == slots.size()) {
        slots = spiral_positions(2 * slots.size(), options.spacing);
      }
      if (!grid.contains(slots[s])) {
        free_slots.push_back(s);
      }
    }
    std::size_t slot = free_slots.front();
    for (std::size_t s : free_slots) {
      if (manhattan(slots[s], at) < manhattan(slots[slot], at)) {
        slot = s;
      }
    }
    grid.add_gate(slots[slot]);
    ++result.extra_gates;
    const auto near = gates_in(comp_of(q0));
    connect(grid, slots[slot], near[nearest(near, slots[slot])]);
    ++result.connections;
  }
  throw GreedyError("greedy place and route did not converge after " +
                        std::to_string(cap) + " iterations",
                    std::move(last));
}

} // namespace qpnr
