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

#include <map>
#include <string>
#include <vector>

namespace qpnr {

/// Critical-path length from each instruction to program end, indexed by
/// instruction id.
using PriorityMap = std::vector<Time>;

/// Instruction id to gate-location name.
using GateAssignment = std::map<InstrId, std::string>;

/// priority(i) = latency(i) + max over successors of priority(successor),
/// ignoring movement.
[[nodiscard]] PriorityMap critical_path_priorities(const DataflowGraph& graph,
                                                   const InstructionSequence& seq,
                                                   const TechnologyParams& tech);

/// As critical_path_priorities, with each arc also weighted by the
/// uncongested travel time between the two assigned gate locations.
/// Throws std::invalid_argument if an instruction is unassigned or names an
/// unknown location, and LayoutError if the layout is invalid.
[[nodiscard]] PriorityMap movement_aware_priorities(
    const DataflowGraph& graph, const InstructionSequence& seq,
    const Layout& layout, const GateAssignment& assignment,
    const TechnologyParams& tech);

} // namespace qpnr
