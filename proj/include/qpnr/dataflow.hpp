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
#include "qpnr/fabric.hpp"
#include "qpnr/priorities.hpp"
#include "qpnr/scheduler.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qpnr {

/// Partition of the dataflow nodes into node groups, each of which becomes
/// one gate location. A group's id is the id of one of its members.
class GroupGraph {
public:
  GroupGraph() = default;
  explicit GroupGraph(const DataflowGraph& df);

  [[nodiscard]] int group_of(int node) const {
    return group_of_.at(static_cast<std::size_t>(node));
  }
  /// Sorted members of a live group.
  [[nodiscard]] const std::vector<int>& members(int group) const {
    return members_.at(group);
  }
  /// Live group ids in increasing order.
  [[nodiscard]] std::vector<int> groups() const;
  [[nodiscard]] std::size_t size() const { return members_.size(); }
  [[nodiscard]] bool has_input(int group) const;
  /// Distinct (from, to) group pairs joined by at least one arc.
  [[nodiscard]] std::set<std::pair<int, int>> edges() const;

  /// False if the union would hold two input nodes. The union may close a
  /// cycle: a location can be revisited after work elsewhere.
  [[nodiscard]] bool can_merge(int a, int b) const;
  /// Folds `absorb` into `keep`. Throws std::invalid_argument if the merge
  /// is not allowed or either id is not a live group.
  void merge(int keep, int absorb);

  [[nodiscard]] const DataflowGraph& dataflow() const { return *df_; }

  friend bool operator==(const GroupGraph& a, const GroupGraph& b) {
    return a.group_of_ == b.group_of_;
  }

private:
  const DataflowGraph* df_ = nullptr;
  std::vector<int> group_of_;
  std::map<int, std::vector<int>> members_;
};

/// One group per dataflow node. The graph must outlive the result.
[[nodiscard]] GroupGraph init_group_graph(const DataflowGraph& df);

struct MergeChoice {
  int first = 0;
  int second = 0;
  /// Arc whose weight the merge removes.
  int arc = 0;
  QubitIndex qubit = 0;
  Time weight = 0;
  friend bool operator==(const MergeChoice&, const MergeChoice&) = default;
};

/// `arc_weights` is indexed by dataflow arc; arcs inside one group count
/// as zero. Takes the qubit with the longest weighted path (ties to the
/// lower qubit), then the heaviest mergeable arc on it (ties to the lower
/// (from, to) node pair), falling back to the next-longest path when none
/// qualifies. Pairs in `banned` are skipped in either order. Returns
/// nullopt when no positive-weight arc can be merged.
[[nodiscard]] std::optional<MergeChoice>
select_merge(const GroupGraph& gg, std::span<const Time> arc_weights,
             const std::set<std::pair<int, int>>& banned = {});

/// Abstract placement: columns of group ids, top row first.
struct GroupPlacement {
  std::vector<std::vector<int>> columns;

  [[nodiscard]] int height() const;
  /// (column, row) of a group. Throws std::out_of_range if absent.
  [[nodiscard]] std::pair<int, int> slot(int group) const;
};

/// Earliest member's instruction id, -1 for a group holding an input node.
[[nodiscard]] int group_rank(const GroupGraph& gg, int group);
/// Longest-path depth of each group over the edges that run from a lower to
/// a higher (rank, id); the remaining edges close cycles and are ignored.
[[nodiscard]] std::map<int, int> group_depths(const GroupGraph& gg);
/// Merges each column into the previous one while the sum of heights stays
/// within the tallest column.
[[nodiscard]] std::vector<std::vector<int>>
fold_columns(std::vector<std::vector<int>> columns);
/// Columns by depth, optionally folded, then three barycenter sweeps.
[[nodiscard]] GroupPlacement place_groups(const GroupGraph& gg, bool fold);

/// Gate location name of a group.
[[nodiscard]] std::string group_name(int group);

/// Gate cells sit `3 + g` columns and `1 + g` rows apart for g global
/// channels per gap. Local channels join groups in the same or adjacent
/// columns; every row gap and column gap gets g full-length global
/// channels; dead ends are pruned and any arc still unconnected gets a
/// detour. `storage` adds that many storage gate locations near a group.
/// Throws std::invalid_argument unless global_channels is 1 or 2.
[[nodiscard]] ChannelGrid route_groups(const GroupPlacement& placement,
                                       const GroupGraph& gg,
                                       int global_channels,
                                       const std::map<int, int>& storage = {});

/// Uncongested travel latency of every dataflow arc between the gate
/// locations of its endpoint groups.
/// Throws std::invalid_argument if a group has no gate location.
[[nodiscard]] std::vector<Time> arc_weights(const GroupGraph& gg,
                                            const Layout& layout,
                                            const MovementGraph& graph);

struct DataflowOptions {
  bool fold = false;
  int global_channels = 1;
  /// Zero means the instruction count.
  int max_merges = 0;
  /// A group is congested when the wait of its instructions exceeds this
  /// multiple of their gate time.
  double congestion_factor = 2.0;
  int max_storage_per_group = 4;
  /// Merges undone when congestion persists.
  int backup = 3;
  /// Stop after this many merges without a new best latency.
  int patience = 5;
  SchedulerOptions scheduler;
};

struct DataflowIterate {
  int merges = 0;
  Time latency = kUnreachable;
  bool deadlocked = false;
  int storage_nodes = 0;
};

struct DataflowResult {
  Layout layout;
  GateAssignment assignment;
  std::vector<BlockId> initial;
  Schedule schedule;
  GroupGraph groups;
  /// Merges applied in the emitted iterate.
  int merges = 0;
  std::vector<DataflowIterate> history;
};

class DataflowError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Iterates place, route, annotated schedule and merge, returning the
/// best-latency iterate. `df` must be build_dataflow(seq) and outlive the
/// result. Throws DataflowError if the unmerged graph deadlocks.
[[nodiscard]] DataflowResult dataflow_layout(const InstructionSequence& seq,
                                             const DataflowGraph& df,
                                             const TechnologyParams& tech,
                                             const DataflowOptions& options = {});

} // namespace qpnr
