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

#include "qpnr/priorities.hpp"

#include <algorithm>
#include <functional>
#include <ranges>

namespace qpnr {

namespace {

PriorityMap longest_paths(const DataflowGraph& graph,
                          const InstructionSequence& seq,
                          const TechnologyParams& tech,
                          const std::function<Time(int, int)>& arc_weight) {
  PriorityMap priority(graph.num_instructions(), 0);
  const auto order = graph.topological_order();
  for (int node : std::views::reverse(order)) {
    if (graph.is_input(node)) {
      continue;
    }
    Time tail = 0;
    for (int a : graph.out_arcs(node)) {
      const auto& arc = graph.arcs()[static_cast<std::size_t>(a)];
      tail = std::max(tail, arc_weight(node, arc.to) +
                                priority[static_cast<std::size_t>(arc.to)]);
    }
    priority[static_cast<std::size_t>(node)] =
        gate_latency(seq[node].gate, tech) + tail;
  }
  return priority;
}

} // namespace

PriorityMap critical_path_priorities(const DataflowGraph& graph,
                                     const InstructionSequence& seq,
                                     const TechnologyParams& tech) {
  return longest_paths(graph, seq, tech, [](int, int) { return Time{0}; });
}

PriorityMap movement_aware_priorities(const DataflowGraph& graph,
                                      const InstructionSequence& seq,
                                      const Layout& layout,
                                      const GateAssignment& assignment,
                                      const TechnologyParams& tech) {
  std::vector<BlockId> where(graph.num_instructions());
  for (std::size_t i = 0; i < where.size(); ++i) {
    auto it = assignment.find(static_cast<InstrId>(i));
    if (it == assignment.end()) {
      throw std::invalid_argument("instruction " + std::to_string(i) +
                                  " has no gate assignment");
    }
    auto block = layout.find_gate(it->second);
    if (!block) {
      throw std::invalid_argument("unknown gate location " + it->second);
    }
    where[i] = *block;
  }
  const auto movement = derive_movement_graph(layout, tech);
  std::map<BlockId, std::vector<Time>> distance_cache;
  auto travel = [&](int from, int to) -> Time {
    const BlockId a = where[static_cast<std::size_t>(from)];
    const BlockId b = where[static_cast<std::size_t>(to)];
    if (a == b) {
      return 0;
    }
    auto it = distance_cache.find(a);
    if (it == distance_cache.end()) {
      it = distance_cache.emplace(a, distances_from(movement, a)).first;
    }
    const Time d = it->second[static_cast<std::size_t>(b)];
    if (d >= kUnreachable) {
      throw LayoutError("gate locations " + layout.block(a).name + " and " +
                        layout.block(b).name + " are not connected");
    }
    return d;
  };
  return longest_paths(graph, seq, tech, travel);
}

} // namespace qpnr
