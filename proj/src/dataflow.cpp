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

#include "qpnr/dataflow.hpp"

#include <algorithm>
#include <deque>
#include <memory>
#include <tuple>

namespace qpnr {

namespace {

std::size_t idx(int i) { return static_cast<std::size_t>(i); }

} // namespace

GroupGraph::GroupGraph(const DataflowGraph& df) : df_(&df) {
  group_of_.resize(df.num_nodes());
  for (std::size_t n = 0; n < df.num_nodes(); ++n) {
    group_of_[n] = static_cast<int>(n);
    members_[static_cast<int>(n)] = {static_cast<int>(n)};
  }
}

GroupGraph init_group_graph(const DataflowGraph& df) { return GroupGraph(df); }

std::vector<int> GroupGraph::groups() const {
  std::vector<int> out;
  out.reserve(members_.size());
  for (const auto& [g, m] : members_) {
    out.push_back(g);
  }
  return out;
}

bool GroupGraph::has_input(int group) const {
  const auto& m = members_.at(group);
  return std::any_of(m.begin(), m.end(), [&](int n) { return df_->is_input(n); });
}

std::set<std::pair<int, int>> GroupGraph::edges() const {
  std::set<std::pair<int, int>> out;
  for (const auto& arc : df_->arcs()) {
    const int a = group_of(arc.from);
    const int b = group_of(arc.to);
    if (a != b) {
      out.emplace(a, b);
    }
  }
  return out;
}

bool GroupGraph::can_merge(int a, int b) const {
  if (a == b || !members_.contains(a) || !members_.contains(b) ||
      (has_input(a) && has_input(b))) {
    return false;
  }
  return true;
}

void GroupGraph::merge(int keep, int absorb) {
  if (!can_merge(keep, absorb)) {
    throw std::invalid_argument("node groups " + std::to_string(keep) + " and " +
                                std::to_string(absorb) + " cannot be merged");
  }
  auto& target = members_.at(keep);
  for (int n : members_.at(absorb)) {
    group_of_[idx(n)] = keep;
    target.push_back(n);
  }
  std::sort(target.begin(), target.end());
  members_.erase(absorb);
}

std::optional<MergeChoice>
select_merge(const GroupGraph& gg, std::span<const Time> arc_weights,
             const std::set<std::pair<int, int>>& banned) {
  const auto& df = gg.dataflow();
  const auto& arcs = df.arcs();
  if (arc_weights.size() != arcs.size()) {
    throw std::invalid_argument("one weight per dataflow arc expected");
  }
  auto weight = [&](int a) {
    const auto& arc = arcs[idx(a)];
    return gg.group_of(arc.from) == gg.group_of(arc.to) ? Time{0}
                                                        : arc_weights[idx(a)];
  };
  std::vector<std::pair<Time, QubitIndex>> paths;
  for (std::size_t q = 0; q < df.num_qubits(); ++q) {
    Time length = 0;
    for (int a : df.qubit_chain(static_cast<QubitIndex>(q))) {
      length += weight(a);
    }
    paths.emplace_back(-length, static_cast<QubitIndex>(q));
  }
  std::sort(paths.begin(), paths.end());
  for (auto [neg_length, q] : paths) {
    if (neg_length >= 0) {
      break;
    }
    std::vector<std::tuple<Time, int, int, int>> candidates;
    for (int a : df.qubit_chain(q)) {
      if (weight(a) > 0) {
        candidates.emplace_back(-weight(a), arcs[idx(a)].from, arcs[idx(a)].to, a);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    for (auto [neg_w, from, to, a] : candidates) {
      const int ga = gg.group_of(from);
      const int gb = gg.group_of(to);
      if (banned.contains({ga, gb}) || banned.contains({gb, ga}) ||
          !gg.can_merge(ga, gb)) {
        continue;
      }
      return MergeChoice{ga, gb, a, q, -neg_w};
    }
  }
  return std::nullopt;
}

int GroupPlacement::height() const {
  std::size_t h = 0;
  for (const auto& c : columns) {
    h = std::max(h, c.size());
  }
  return static_cast<int>(h);
}

std::pair<int, int> GroupPlacement::slot(int group) const {
  for (std::size_t c = 0; c < columns.size(); ++c) {
    const auto& col = columns[c];
    if (auto it = std::find(col.begin(), col.end(), group); it != col.end()) {
      return {static_cast<int>(c), static_cast<int>(it - col.begin())};
    }
  }
  throw std::out_of_range("group " + std::to_string(group) + " is not placed");
}

int group_rank(const GroupGraph& gg, int group) {
  return gg.has_input(group) ? -1 : gg.members(group).front();
}

std::map<int, int> group_depths(const GroupGraph& gg) {
  // Instruction ids are a topological order, so ordering groups by their
  // earliest member and dropping edges against that order leaves a DAG.
  std::vector<int> order = gg.groups();
  auto key = [&](int g) { return std::make_pair(group_rank(gg, g), g); };
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return key(a) < key(b); });
  std::map<int, std::vector<int>> pred;
  for (auto [a, b] : gg.edges()) {
    if (key(a) < key(b)) {
      pred[b].push_back(a);
    }
  }
  std::map<int, int> depth;
  for (int g : order) {
    int d = 0;
    for (int p : pred[g]) {
      d = std::max(d, depth.at(p) + 1);
    }
    depth[g] = d;
  }
  return depth;
}

std::vector<std::vector<int>> fold_columns(std::vector<std::vector<int>> columns) {
  std::size_t height = 0;
  for (const auto& c : columns) {
    height = std::max(height, c.size());
  }
  std::vector<std::vector<int>> out;
  for (auto& c : columns) {
    if (!out.empty() && out.back().size() + c.size() <= height) {
      out.back().insert(out.back().end(), c.begin(), c.end());
    } else {
      out.push_back(std::move(c));
    }
  }
  return out;
}

GroupPlacement place_groups(const GroupGraph& gg, bool fold) {
  GroupPlacement placement;
  for (auto [g, d] : group_depths(gg)) {
    if (placement.columns.size() <= idx(d)) {
      placement.columns.resize(idx(d) + 1);
    }
    placement.columns[idx(d)].push_back(g);
  }
  if (fold) {
    placement.columns = fold_columns(std::move(placement.columns));
  }
  std::map<int, std::vector<int>> neighbours;
  for (auto [a, b] : gg.edges()) {
    neighbours[a].push_back(b);
    neighbours[b].push_back(a);
  }
  std::map<int, std::pair<int, int>> slot;
  auto refresh = [&] {
    for (std::size_t c = 0; c < placement.columns.size(); ++c) {
      for (std::size_t r = 0; r < placement.columns[c].size(); ++r) {
        slot[placement.columns[c][r]] = {static_cast<int>(c), static_cast<int>(r)};
      }
    }
  };
  refresh();
  const int n = static_cast<int>(placement.columns.size());
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (int k = 0; k < n; ++k) {
      const int c = sweep % 2 == 0 ? k : n - 1 - k;
      auto& column = placement.columns[idx(c)];
      std::map<int, double> centre;
      for (int g : column) {
        double sum = 0.0;
        int count = 0;
        for (int m : neighbours[g]) {
          if (slot.at(m).first != c) {
            sum += slot.at(m).second;
            ++count;
          }
        }
        centre[g] = count > 0 ? sum / count : slot.at(g).second;
      }
      std::stable_sort(column.begin(), column.end(),
                       [&](int a, int b) { return centre[a] < centre[b]; });
      refresh();
    }
  }
  return placement;
}

std::string group_name(int group) { return "NG" + std::to_string(group + 1); }

namespace {

std::vector<Position> straight(Position a, Position b) {
  std::vector<Position> out{a};
  while (out.back() != b) {
    Position p = out.back();
    if (p.col != b.col) {
      p.col += p.col < b.col ? 1 : -1;
    } else {
      p.row += p.row < b.row ? 1 : -1;
    }
    out.push_back(p);
  }
  return out;
}

void add_storage(ChannelGrid& grid, Position gate, int group, int count) {
  std::set<Position> seen{gate};
  std::deque<Position> queue{gate};
  int added = 0;
  while (!queue.empty() && added < count) {
    const Position p = queue.front();
    queue.pop_front();
    const auto* cell = grid.find(p);
    if (!cell->gate) {
      for (auto d : kDirections) {
        const Position n = p.step(d);
        if (added < count && !grid.contains(n)) {
          grid.add_gate(n, "ST" + std::to_string(group + 1) + "_" +
                               std::to_string(added));
          grid.link(p, n);
          ++added;
        }
      }
    }
    for (auto d : kDirections) {
      const Position n = p.step(d);
      const auto* next = grid.find(n);
      if (next != nullptr && has_port(cell->ports, d) &&
          has_port(next->ports, opposite(d)) && !next->gate &&
          seen.insert(n).second) {
        queue.push_back(n);
      }
    }
  }
}

} // namespace

ChannelGrid route_groups(const GroupPlacement& placement, const GroupGraph& gg,
                         int global_channels, const std::map<int, int>& storage) {
  if (global_channels != 1 && global_channels != 2) {
    throw std::invalid_argument("global channels per gap must be 1 or 2");
  }
  const int pitch_x = 3 + global_channels;
  const int pitch_y = 1 + global_channels;
  const int columns = static_cast<int>(placement.columns.size());
  const int rows = placement.height();
  ChannelGrid grid;
  std::map<int, Position> at;
  for (int c = 0; c < columns; ++c) {
    const auto& column = placement.columns[idx(c)];
    for (int r = 0; r < static_cast<int>(column.size()); ++r) {
      const Position p{c * pitch_x, r * pitch_y};
      at[column[idx(r)]] = p;
      grid.add_gate(p, group_name(column[idx(r)]));
    }
  }
  const auto edges = gg.edges();
  const auto east = Direction::East;
  const auto west = Direction::West;
  for (auto [ga, gb] : edges) {
    Position a = at.at(ga);
    Position b = at.at(gb);
    if (a.col > b.col) {
      std::swap(a, b);
    }
    if (a.col == b.col) {
      std::vector<Position> path{a};
      for (Position p : straight(a.step(east), b.step(east))) {
        path.push_back(p);
      }
      path.push_back(b);
      grid.link_path(path);
    } else if (b.col - a.col == pitch_x) {
      std::vector<Position> path{a};
      const Position corner{b.col - 1, a.row};
      for (Position p : straight(a.step(east), corner)) {
        path.push_back(p);
      }
      const auto down = straight(corner, b.step(west));
      path.insert(path.end(), down.begin() + 1, down.end());
      path.push_back(b);
      grid.link_path(path);
    } else {
      grid.link_path({a, a.step(east), a.step(east, 2)});
      grid.link_path({b, b.step(west), b.step(west, 2)});
    }
  }
  const int last_row = (rows - 1) * pitch_y;
  for (int c = 0; c + 1 < columns; ++c) {
    for (int k = 0; k < global_channels; ++k) {
      const int x = c * pitch_x + 2 + k;
      grid.link_path(straight({x, 0}, {x, last_row}));
    }
  }
  const int last_col = (columns - 1) * pitch_x + 1;
  for (int r = 0; r + 1 < rows; ++r) {
    for (int k = 0; k < global_channels; ++k) {
      const int y = r * pitch_y + 1 + k;
      grid.link_path(straight({1, y}, {last_col, y}));
    }
  }
  if (rows > 1) {
    for (const auto& [g, p] : at) {
      const int dy = p.row < last_row ? 1 : -1;
      for (auto d : {west, east}) {
        if (has_port(grid.find(p)->ports, d)) {
          const Position access = p.step(d);
          grid.link(access, {access.col, access.row + dy});
        }
      }
    }
  }
  grid.prune();
  for (auto [ga, gb] : edges) {
    connect(grid, at.at(ga), at.at(gb));
  }
  for (auto [g, count] : storage) {
    if (count > 0) {
      add_storage(grid, at.at(g), g, count);
    }
  }
  return grid;
}

std::vector<Time> arc_weights(const GroupGraph& gg, const Layout& layout,
                              const MovementGraph& graph) {
  std::map<int, BlockId> block;
  for (int g : gg.groups()) {
    const auto b = layout.find_gate(group_name(g));
    if (!b) {
      throw std::invalid_argument("no gate location named " + group_name(g));
    }
    block[g] = *b;
  }
  std::map<int, std::vector<Time>> dist;
  std::vector<Time> out;
  for (const auto& arc : gg.dataflow().arcs()) {
    const int a = gg.group_of(arc.from);
    const int b = gg.group_of(arc.to);
    if (a == b) {
      out.push_back(0);
      continue;
    }
    auto it = dist.find(a);
    if (it == dist.end()) {
      it = dist.emplace(a, distances_from(graph, block[a], {})).first;
    }
    out.push_back(it->second[idx(block[b])]);
  }
  return out;
}

namespace {

struct Evaluation {
  Layout layout;
  GateAssignment assignment;
  std::vector<BlockId> initial;
  ScheduleResult result;
  std::vector<Time> weights;
  MovementGraph graph;
};

Evaluation evaluate(const InstructionSequence& seq, const GroupGraph& gg,
                    const std::map<int, int>& storage,
                    const TechnologyParams& tech, const DataflowOptions& options) {
  const auto& df = gg.dataflow();
  const auto grid = route_groups(place_groups(gg, options.fold), gg,
                                 options.global_channels, storage);
  Evaluation e{grid.to_layout(), {}, {}, DeadlockReport{}, {}, {}};
  for (std::size_t i = 0; i < seq.size(); ++i) {
    e.assignment[static_cast<InstrId>(i)] = group_name(gg.group_of(static_cast<int>(i)));
  }
  for (std::size_t q = 0; q < df.num_qubits(); ++q) {
    const int g = gg.group_of(df.input_node(static_cast<QubitIndex>(q)));
    e.initial.push_back(*e.layout.find_gate(group_name(g)));
  }
  e.graph = derive_movement_graph(e.layout, tech);
  const auto& graph = e.graph;
  e.weights = arc_weights(gg, e.layout, graph);
  const auto priorities =
      movement_aware_priorities(df, seq, e.layout, e.assignment, tech);
  e.result = schedule(seq, e.layout, graph, e.initial, priorities, e.assignment,
                      options.scheduler);
  return e;
}

// Wait of each instruction beyond the uncongested travel time of its
// slowest operand from where it stood when the instruction became ready.
std::vector<Time> excess_waits(const Schedule& s, const InstructionSequence& seq,
                               const MovementGraph& graph) {
  std::map<QubitIndex, std::vector<const HopEvent*>> hops;
  for (const auto& h : s.hops) {
    hops[h.qubit].push_back(&h);
  }
  std::map<BlockId, std::vector<Time>> dist;
  std::vector<Time> out(seq.size(), 0);
  for (const auto& stall : s.stalls) {
    const BlockId loc = s.gates[idx(stall.instruction)].block;
    auto it = dist.find(loc);
    if (it == dist.end()) {
      it = dist.emplace(loc, distances_from(graph, loc, {})).first;
    }
    Time travel = 0;
    for (QubitIndex q : seq[stall.instruction].operands) {
      BlockId at = s.initial[static_cast<std::size_t>(q)];
      for (const HopEvent* h : hops[q]) {
        if (h->start >= stall.ready) {
          break;
        }
        at = h->to;
      }
      travel = std::max(travel, it->second[idx(at)]);
    }
    out[idx(stall.instruction)] = std::max<Time>(0, stall.wait - travel);
  }
  return out;
}

struct Snapshot {
  GroupGraph gg;
  std::map<int, int> storage;
  int merges = 0;
  std::pair<int, int> merged;
};

struct Candidate {
  int merges = 0;
  Time latency = kUnreachable;
  std::shared_ptr<const Evaluation> eval;
  GroupGraph gg;
};

} // namespace

DataflowResult dataflow_layout(const InstructionSequence& seq,
                               const DataflowGraph& df,
                               const TechnologyParams& tech,
                               const DataflowOptions& options) {
  const int max_merges =
      options.max_merges > 0 ? options.max_merges : static_cast<int>(seq.size());
  GroupGraph gg(df);
  std::map<int, int> storage;
  std::vector<Snapshot> undo;
  std::set<std::pair<int, int>> banned;
  std::vector<Candidate> candidates;
  std::vector<DataflowIterate> history;
  int merges = 0;
  int since_best = 0;
  int storage_rounds = 0;
  bool skip_relief = false;
  std::optional<int> halt_limit;

  auto group_time = [&](int g) {
    Time t = 0;
    for (int n : gg.members(g)) {
      if (!df.is_input(n)) {
        t += gate_latency(seq[static_cast<InstrId>(n)].gate, tech);
      }
    }
    return t;
  };

  while (true) {
    auto eval = std::make_shared<Evaluation>(evaluate(seq, gg, storage, tech, options));
    int nodes = 0;
    for (auto [g, k] : storage) {
      nodes += k;
    }
    const auto* done = std::get_if<Schedule>(&eval->result);
    history.push_back({merges, done ? done->total_latency : kUnreachable,
                       done == nullptr, nodes});
    if (done == nullptr) {
      if (undo.empty()) {
        throw DataflowError("annotated schedule of the unmerged node groups "
                            "deadlocks: " +
                            std::get<DeadlockReport>(eval->result).reason);
      }
      auto last = std::move(undo.back());
      undo.pop_back();
      gg = std::move(last.gg);
      storage = std::move(last.storage);
      merges = last.merges;
      banned.insert(last.merged);
      skip_relief = true;
      continue;
    }
    const bool best = candidates.empty() ||
                      std::none_of(candidates.begin(), candidates.end(),
                                   [&](const Candidate& c) {
                                     return c.latency <= done->total_latency;
                                   });
    candidates.push_back({merges, done->total_latency, eval, gg});
    since_best = best ? 0 : since_best + (storage_rounds == 0 ? 1 : 0);
    if (since_best >= options.patience) {
      break;
    }

    if (!skip_relief) {
      const auto waits = excess_waits(*done, seq, eval->graph);
      std::vector<int> congested;
      bool saturated = false;
      for (int g : gg.groups()) {
        const auto& m = gg.members(g);
        if (std::count_if(m.begin(), m.end(),
                          [&](int n) { return !df.is_input(n); }) < 2) {
          continue;
        }
        Time wait = 0;
        for (int n : gg.members(g)) {
          if (!df.is_input(n)) {
            wait += waits[idx(n)];
          }
        }
        const Time busy = group_time(g);
        if (busy > 0 && static_cast<double>(wait) >
                            options.congestion_factor * static_cast<double>(busy)) {
          if (storage[g] < options.max_storage_per_group) {
            congested.push_back(g);
          } else if (storage_rounds > 0) {
            saturated = true;
          }
        }
      }
      if (saturated) {
        halt_limit = std::max(0, merges - options.backup);
        break;
      }
      if (!congested.empty() && storage_rounds < options.max_storage_per_group) {
        for (int g : congested) {
          ++storage[g];
        }
        ++storage_rounds;
        continue;
      }
    }
    skip_relief = false;
    storage_rounds = 0;

    if (merges >= max_merges) {
      break;
    }
    const auto choice = select_merge(gg, eval->weights, banned);
    if (!choice) {
      break;
    }
    int keep = choice->first;
    int absorb = choice->second;
    if (std::make_pair(group_time(absorb), -absorb) >
        std::make_pair(group_time(keep), -keep)) {
      std::swap(keep, absorb);
    }
    undo.push_back({gg, storage, merges, {choice->first, choice->second}});
    gg.merge(keep, absorb);
    const int moved = std::exchange(storage[absorb], 0);
    storage.erase(absorb);
    storage[keep] = std::min(options.max_storage_per_group, storage[keep] + moved);
    ++merges;
  }

  const Candidate* chosen = nullptr;
  for (const auto& c : candidates) {
    if (halt_limit && c.merges > *halt_limit) {
      continue;
    }
    if (chosen == nullptr || c.latency < chosen->latency) {
      chosen = &c;
    }
  }
  DataflowResult out{chosen->eval->layout,
                     chosen->eval->assignment,
                     chosen->eval->initial,
                     std::get<Schedule>(chosen->eval->result),
                     chosen->gg,
                     chosen->merges,
                     std::move(history)};
  return out;
}

} // namespace qpnr
