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

#include "qpnr/fabric.hpp"

#include <functional>
#include <queue>

namespace qpnr {

namespace {

// Search states are (block, direction of the last hop); slot 4 means the
// route has not moved yet.
constexpr int kSlots = 5;
constexpr int kNoArrival = 4;

std::optional<Direction> slot_direction(int slot) {
  if (slot == kNoArrival) {
    return std::nullopt;
  }
  return static_cast<Direction>(slot);
}

Time block_cost(std::span<const Time> penalty, BlockId b) {
  return penalty.empty() ? 0 : penalty[static_cast<std::size_t>(b)];
}

Time exit_cost(std::span<const std::array<Time, 4>> penalty, BlockId b,
               Direction d) {
  return penalty.empty()
             ? 0
             : penalty[static_cast<std::size_t>(b)][static_cast<std::size_t>(d)];
}

Time step_cost(const MovementGraph& g, const RouteCosts& costs, BlockId b,
               int slot, Direction d, BlockId next) {
  return g.hop_latency(slot_direction(slot), d) +
         block_cost(costs.block_penalty, next) +
         exit_cost(costs.exit_penalty, b, d);
}

using Entry = std::pair<Time, int>;
using MinQueue = std::priority_queue<Entry, std::vector<Entry>, std::greater<>>;

// Cost-to-go into `to`, exact for every state no costlier than `stop`.
std::vector<Time> cost_to_go(const MovementGraph& g, BlockId to,
                             const RouteCosts& costs, int stop) {
  std::vector<Time> h(g.size() * kSlots, kUnreachable);
  MinQueue queue;
  for (int s = 0; s < kSlots; ++s) {
    h[static_cast<std::size_t>(to * kSlots + s)] = 0;
  }
  // Only arrival slots are reachable by a hop, so they seed the search.
  for (int s = 0; s < 4; ++s) {
    queue.emplace(0, to * kSlots + s);
  }
  while (!queue.empty()) {
    auto [value, state] = queue.top();
    queue.pop();
    if (value > h[static_cast<std::size_t>(stop)]) {
      break;
    }
    if (value != h[static_cast<std::size_t>(state)] || value >= kUnreachable) {
      continue;
    }
    const BlockId n = state / kSlots;
    const int d_slot = state % kSlots;
    if (d_slot == kNoArrival) {
      continue;
    }
    const auto d = static_cast<Direction>(d_slot);
    const BlockId b = g.neighbor(n, opposite(d));
    if (b == MovementGraph::kNone || b == to) {
      continue;
    }
    for (int s = 0; s < kSlots; ++s) {
      const Time candidate = value + step_cost(g, costs, b, s, d, n);
      auto& slot_value = h[static_cast<std::size_t>(b * kSlots + s)];
      if (candidate < slot_value) {
        slot_value = candidate;
        queue.emplace(candidate, b * kSlots + s);
      }
    }
  }
  return h;
}

} // namespace

std::optional<Time> path_latency(const MovementGraph& graph, BlockId from,
                                 std::span<const BlockId> hops,
                                 std::span<const Time> block_penalty) {
  Time total = 0;
  std::optional<Direction> previous;
  BlockId at = from;
  for (BlockId next : hops) {
    const auto d = graph.direction_between(at, next);
    if (!d) {
      return std::nullopt;
    }
    total += graph.hop_latency(previous, *d) + block_cost(block_penalty, next);
    previous = d;
    at = next;
  }
  return total;
}

PathResult find_route(const MovementGraph& graph, BlockId from, BlockId to,
                      const RouteCosts& costs) {
  PathResult result;
  if (from == to) {
    result.found = true;
    return result;
  }
  int slot = costs.arrival ? static_cast<int>(*costs.arrival) : kNoArrival;
  const auto h = cost_to_go(graph, to, costs, from * kSlots + slot);
  const Time total = h[static_cast<std::size_t>(from * kSlots + slot)];
  if (total >= kUnreachable) {
    return result;
  }
  BlockId at = from;
  while (at != to) {
    const Time remaining = h[static_cast<std::size_t>(at * kSlots + slot)];
    BlockId best = MovementGraph::kNone;
    Direction best_dir = Direction::North;
    for (auto d : kDirections) {
      const BlockId n = graph.neighbor(at, d);
      if (n == MovementGraph::kNone) {
        continue;
      }
      const Time via = step_cost(graph, costs, at, slot, d, n) +
                       h[static_cast<std::size_t>(n * kSlots + static_cast<int>(d))];
      if (via == remaining && (best == MovementGraph::kNone || n < best)) {
        best = n;
        best_dir = d;
      }
    }
    result.hops.push_back(best);
    at = best;
    slot = static_cast<int>(best_dir);
  }
  result.found = true;
  result.latency = total;
  return result;
}

PathResult shortest_path(const MovementGraph& graph, BlockId from, BlockId to,
                         std::span<const Time> block_penalty) {
  return find_route(graph, from, to, RouteCosts{block_penalty, {}, std::nullopt});
}

std::vector<Time> distances_from(const MovementGraph& graph, BlockId from,
                                 const RouteCosts& costs) {
  std::vector<Time> dist(graph.size() * kSlots, kUnreachable);
  MinQueue queue;
  const int start_slot = costs.arrival ? static_cast<int>(*costs.arrival) : kNoArrival;
  dist[static_cast<std::size_t>(from * kSlots + start_slot)] = 0;
  queue.emplace(0, from * kSlots + start_slot);
  while (!queue.empty()) {
    auto [value, state] = queue.top();
    queue.pop();
    if (value != dist[static_cast<std::size_t>(state)] || value >= kUnreachable) {
      continue;
    }
    const BlockId b = state / kSlots;
    const int slot = state % kSlots;
    for (auto d : kDirections) {
      const BlockId n = graph.neighbor(b, d);
      if (n == MovementGraph::kNone) {
        continue;
      }
      const Time candidate = value + step_cost(graph, costs, b, slot, d, n);
      auto& target = dist[static_cast<std::size_t>(n * kSlots + static_cast<int>(d))];
      if (candidate < target) {
        target = candidate;
        queue.emplace(candidate, n * kSlots + static_cast<int>(d));
      }
    }
  }
  std::vector<Time> out(graph.size(), kUnreachable);
  for (std::size_t b = 0; b < graph.size(); ++b) {
    for (int s = 0; s < kSlots; ++s) {
      out[b] = std::min(out[b], dist[b * kSlots + static_cast<std::size_t>(s)]);
    }
    out[b] = std::min(out[b], kUnreachable);
  }
  out[static_cast<std::size_t>(from)] = 0;
  return out;
}

} // namespace qpnr
