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

#include "qpnr/tech.hpp"

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qpnr {

enum class Direction : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };

inline constexpr std::array<Direction, 4> kDirections{
    Direction::North, Direction::East, Direction::South, Direction::West};

[[nodiscard]] constexpr Direction opposite(Direction d) {
  return static_cast<Direction>((static_cast<int>(d) + 2) % 4);
}
/// Quarter turn clockwise.
[[nodiscard]] constexpr Direction rotate_cw(Direction d, int quarter_turns = 1) {
  return static_cast<Direction>((static_cast<int>(d) + quarter_turns % 4 + 4) % 4);
}
[[nodiscard]] char direction_letter(Direction d);

using PortMask = std::uint8_t;

[[nodiscard]] constexpr PortMask port_bit(Direction d) {
  return static_cast<PortMask>(1U << static_cast<unsigned>(d));
}
[[nodiscard]] constexpr bool has_port(PortMask mask, Direction d) {
  return (mask & port_bit(d)) != 0;
}
[[nodiscard]] int port_count(PortMask mask);

/// Grid coordinate; rows grow southward.
struct Position {
  int col = 0;
  int row = 0;

  [[nodiscard]] Position step(Direction d, int n = 1) const;
  friend bool operator==(const Position&, const Position&) = default;
  /// Row-major ordering.
  friend std::strong_ordering operator<=>(const Position& a, const Position& b) {
    if (auto c = a.row <=> b.row; c != 0) {
      return c;
    }
    return a.col <=> b.col;
  }
};

[[nodiscard]] int manhattan(Position a, Position b);

enum class MacroblockKind : std::uint8_t {
  StraightChannel,
  GateChannel,
  Turn,
  ThreeWayIntersection,
  FourWayIntersection,
  DeadEnd,
};

inline constexpr std::array<MacroblockKind, 6> kMacroblockKinds{
    MacroblockKind::StraightChannel,      MacroblockKind::GateChannel,
    MacroblockKind::Turn,                 MacroblockKind::ThreeWayIntersection,
    MacroblockKind::FourWayIntersection, MacroblockKind::DeadEnd};

[[nodiscard]] std::string_view kind_name(MacroblockKind kind);
[[nodiscard]] std::optional<MacroblockKind> parse_kind_name(std::string_view name);
/// Gate and storage traps live only in GateChannel and DeadEnd blocks.
[[nodiscard]] bool kind_has_gate(MacroblockKind kind);
/// Ports of a kind at rotation 0: straight pieces run east-west, Turn opens
/// east and south, ThreeWay is closed to the north, DeadEnd opens east.
[[nodiscard]] PortMask base_ports(MacroblockKind kind);
/// Rotation in degrees, clockwise, multiple of 90.
[[nodiscard]] PortMask rotated_ports(MacroblockKind kind, int rotation);
/// Rotations that give distinct port sets, in increasing order.
[[nodiscard]] std::vector<int> canonical_rotations(MacroblockKind kind);

struct KindRotation {
  MacroblockKind kind;
  int rotation;
};
/// The library piece realising a port mask, canonical rotation. Gate pieces
/// are limited to one port or two opposite ports.
[[nodiscard]] std::optional<KindRotation> piece_for_ports(PortMask mask,
                                                          bool gate);

using BlockId = int;

struct PlacedMacroblock {
  MacroblockKind kind = MacroblockKind::StraightChannel;
  Position position;
  int rotation = 0;
  BlockId id = -1;
  /// Gate-location name; set exactly for gate-capable kinds.
  std::string name;

  [[nodiscard]] PortMask ports() const { return rotated_ports(kind, rotation); }
  [[nodiscard]] bool has_gate() const { return kind_has_gate(kind); }
};

struct BlockSpec {
  MacroblockKind kind = MacroblockKind::StraightChannel;
  Position position;
  int rotation = 0;
  std::string name;
};

class LayoutError : public std::runtime_error {
public:
  LayoutError(const std::string& message, std::vector<Position> where = {})
      : std::runtime_error(message), positions(std::move(where)) {}
  std::vector<Position> positions;
};

/// Planar arrangement of macroblocks. Blocks are kept in row-major position
/// order and block ids are indices into that order. Gate blocks without an
/// explicit name are named `G<col>_<row>`.
class Layout {
public:
  Layout() = default;
  /// Throws LayoutError on duplicate positions, duplicate gate names or a
  /// rotation that is not a multiple of 90.
  explicit Layout(std::vector<BlockSpec> specs);

  [[nodiscard]] const std::vector<PlacedMacroblock>& blocks() const {
    return blocks_;
  }
  [[nodiscard]] const PlacedMacroblock& block(BlockId id) const {
    return blocks_.at(static_cast<std::size_t>(id));
  }
  [[nodiscard]] std::size_t size() const { return blocks_.size(); }
  [[nodiscard]] bool empty() const { return blocks_.empty(); }

  [[nodiscard]] std::optional<BlockId> at(Position p) const;
  [[nodiscard]] std::optional<BlockId> find_gate(std::string_view name) const;
  /// Gate-capable block ids in increasing order.
  [[nodiscard]] const std::vector<BlockId>& gate_blocks() const {
    return gates_;
  }

  /// Positions of interior port mismatches: both neighbours present and
  /// exactly one side open. Ports facing empty positions are exterior.
  [[nodiscard]] std::vector<Position> port_mismatches() const;
  [[nodiscard]] bool valid() const { return port_mismatches().empty(); }

  [[nodiscard]] std::vector<BlockSpec> specs() const;
  /// Whole-layout clockwise rotation by quarter turns about the origin.
  [[nodiscard]] Layout rotated(int quarter_turns) const;

private:
  std::vector<PlacedMacroblock> blocks_;
  std::map<Position, BlockId> index_;
  std::map<std::string, BlockId, std::less<>> names_;
  std::vector<BlockId> gates_;
};

/// Bounding-box area in macroblocks. Throws LayoutError for an empty layout.
[[nodiscard]] long area(const Layout& layout);

struct BoundingBox {
  Position min;
  Position max;
  [[nodiscard]] int width() const { return max.col - min.col + 1; }
  [[nodiscard]] int height() const { return max.row - min.row + 1; }
};
[[nodiscard]] BoundingBox bounding_box(const Layout& layout);

/// Deterministic text: one block per line, `(col,row) Kind rotation [name]`,
/// row-major order.
[[nodiscard]] std::string write_layout(const Layout& layout);
[[nodiscard]] Layout read_layout(std::string_view text);

/// Block adjacency through matched open ports. Every edge carries the base
/// latency t_straight in both directions; a hop that changes direction
/// relative to the previous hop of the same route pays the turn surcharge.
class MovementGraph {
public:
  static constexpr BlockId kNone = -1;

  [[nodiscard]] std::size_t size() const { return neighbors_.size(); }
  [[nodiscard]] BlockId neighbor(BlockId b, Direction d) const {
    return neighbors_.at(static_cast<std::size_t>(b))[static_cast<std::size_t>(d)];
  }
  [[nodiscard]] std::optional<Direction> direction_between(BlockId from,
                                                           BlockId to) const;
  [[nodiscard]] const TechnologyParams& tech() const { return tech_; }
  [[nodiscard]] Time edge_latency(BlockId a, BlockId b) const;
  /// Latency of a hop in direction `next` after arriving by `previous`.
  [[nodiscard]] Time hop_latency(std::optional<Direction> previous,
                                 Direction next) const {
    return tech_.t_straight +
           (previous && *previous != next ? tech_.turn_surcharge() : 0);
  }

  struct Edge {
    BlockId from;
    BlockId to;
    Time latency;
  };
  /// Directed edges, both orientations, sorted.
  [[nodiscard]] std::vector<Edge> edges() const;
  [[nodiscard]] std::size_t num_components() const;
  /// Component index per block, numbered in order of the lowest block id.
  [[nodiscard]] std::vector<int> component_labels() const;

private:
  friend MovementGraph derive_movement_graph(const Layout&,
                                             const TechnologyParams&);
  std::vector<std::array<BlockId, 4>> neighbors_;
  TechnologyParams tech_;
};

/// Throws LayoutError listing mismatched positions.
[[nodiscard]] MovementGraph derive_movement_graph(const Layout& layout,
                                                  const TechnologyParams& tech);

/// Cost of following `hops` from `from`; the first hop pays no turn.
/// Returns nullopt if a hop is not an edge.
[[nodiscard]] std::optional<Time>
path_latency(const MovementGraph& graph, BlockId from,
             std::span<const BlockId> hops,
             std::span<const Time> block_penalty = {});

struct PathResult {
  bool found = false;
  /// Blocks entered after `from`, ending at the target.
  std::vector<BlockId> hops;
  Time latency = 0;
};

/// Minimum-latency path with per-block congestion penalties charged on
/// entry; a penalty of kUnreachable or more makes a block impassable. Ties go to the lexicographically smallest hop sequence. An
/// unreachable target gives `found == false`.
[[nodiscard]] PathResult shortest_path(const MovementGraph& graph, BlockId from,
                                       BlockId to,
                                       std::span<const Time> block_penalty = {});

/// Full cost model used by the scheduler: block penalties on entry, extra
/// cost per (block, exit direction), and the arrival direction into `from`
/// for in-flight re-routing.
struct RouteCosts {
  std::span<const Time> block_penalty;
  std::span<const std::array<Time, 4>> exit_penalty;
  std::optional<Direction> arrival;
};

[[nodiscard]] PathResult find_route(const MovementGraph& graph, BlockId from,
                                    BlockId to, const RouteCosts& costs);

/// Single-source costs to every block (kUnreachable if none).
[[nodiscard]] std::vector<Time> distances_from(const MovementGraph& graph,
                                               BlockId from,
                                               const RouteCosts& costs = {});

} // namespace qpnr
