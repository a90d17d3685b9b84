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

#include "qpnr/channel_grid.hpp"
#include "qpnr/circuit.hpp"
#include "qpnr/scheduler.hpp"

#include <stdexcept>
#include <vector>

namespace qpnr {

/// Lattice points ordered by square rings around the origin, each ring
/// walked clockwise from its eastern midpoint, scaled by `spacing`.
[[nodiscard]] std::vector<Position> spiral_positions(std::size_t n,
                                                     int spacing = 2);

struct GreedyOptions {
  /// Scheduling attempts before giving up; 0 means 10 per instruction.
  int max_iterations = 0;
  int spacing = 2;
  SchedulerOptions scheduler;
};

struct GreedyResult {
  Layout layout;
  std::vector<BlockId> initial;
  Schedule schedule;
  int iterations = 0;
  int connections = 0;
  /// Gate locations added beyond one per qubit.
  int extra_gates = 0;
};

class GreedyError : public std::runtime_error {
public:
  GreedyError(const std::string& message, DeadlockReport last)
      : std::runtime_error(message), last_deadlock(std::move(last)) {}
  DeadlockReport last_deadlock;
};

/// Place and route by repeated scheduling. Every qubit starts in its own
/// gate location, laid out on a spiral in first-use order, with no
/// channels. Each deadlock that strands the operands of an instruction in
/// separate components connects the nearest gate pair of those components;
/// a deadlock inside one component adds a gate location next in the spiral
/// and links it to the blocked operands. Throws std::invalid_argument for
/// an empty sequence and GreedyError when the iteration cap is reached.
[[nodiscard]] GreedyResult greedy_layout(const InstructionSequence& seq,
                                         const TechnologyParams& tech,
                                         const GreedyOptions& options = {});

} // namespace qpnr
