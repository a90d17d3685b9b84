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
#include "qpnr/priorities.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace qpnr {

/// One hop of one ion between adjacent blocks. The ion holds both blocks
/// for the duration of the hop. Hops sharing a route id form one continuous
/// motion; the first hop of a route pays no turn.
struct HopEvent {
  Time start = 0;
  Time end = 0;
  QubitIndex qubit = 0;
  BlockId from = 0;
  BlockId to = 0;
  int route = 0;
  friend bool operator==(const HopEvent&, const HopEvent&) = default;
};

struct GateEvent {
  InstrId instruction = 0;
  BlockId block = 0;
  Time start = 0;
  Time end = 0;
  std::vector<QubitIndex> qubits;
  friend bool operator==(const GateEvent&, const GateEvent&) = default;
};

struct StallRecord {
  InstrId instruction = 0;
  Time ready = 0;
  Time start = 0;
  /// start - ready: travel plus contention.
  Time wait = 0;
  /// First resource the instruction waited on, empty if it only travelled.
  std::string resource;
  friend bool operator==(const StallRecord&, const StallRecord&) = default;
};

struct Schedule {
  std::vector<BlockId> initial;
  std::vector<HopEvent> hops;
  /// Indexed by instruction id.
  std::vector<GateEvent> gates;
  std::vector<StallRecord> stalls;
  std::vector<BlockId> final_positions;
  Time total_latency = 0;
  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct DeadlockReport {
  Time time = 0;
  /// Highest-priority instruction not yet started, ties to the lower id.
  InstrId blocked_instruction = 0;
  std::vector<BlockId> qubit_positions;
  std::string reason;
};

using ScheduleResult = std::variant<Schedule, DeadlockReport>;

struct SchedulerOptions {
  /// Added per occupied block when routing; non-positive means 5 * t_straight.
  Time congestion_penalty = 0;
  /// Consecutive rounds without a gate starting or ending before the run is
  /// reported as a livelock.
  long max_idle_rounds = 2'000;
  /// When concurrent movement jams, finish by running one instruction and
  /// moving one ion at a time instead of reporting a deadlock. A deadlock
  /// is still reported if even that cannot make progress.
  bool serial_fallback = true;
};

/// Event-driven greedy list scheduler. `initial` maps each qubit index to a
/// distinct block. With an assignment every instruction runs at its named
/// gate location; without one a free location is chosen per instruction.
/// Throws std::invalid_argument on a bad placement or assignment and
/// LayoutError if the layout is invalid.
[[nodiscard]] ScheduleResult
schedule(const InstructionSequence& seq, const Layout& layout,
         const std::vector<BlockId>& initial, const PriorityMap& priorities,
         const std::optional<GateAssignment>& assignment,
         const TechnologyParams& tech, const SchedulerOptions& options = {});

/// Same, reusing a movement graph already derived from `layout`.
[[nodiscard]] ScheduleResult
schedule(const InstructionSequence& seq, const Layout& layout,
         const MovementGraph& graph, const std::vector<BlockId>& initial,
         const PriorityMap& priorities,
         const std::optional<GateAssignment>& assignment,
         const SchedulerOptions& options = {});

/// Independent consistency check of a schedule. Returns the violations
/// found, empty if the schedule is sound.
[[nodiscard]] std::vector<std::string>
validate_schedule(const Schedule& schedule, const InstructionSequence& seq,
                  const Layout& layout, const TechnologyParams& tech);

} // namespace qpnr
