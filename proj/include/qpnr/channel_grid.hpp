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

#include "qpnr/fabric.hpp"

#include <map>
#include <string>
#include <vector>

namespace qpnr {

/// Free-form fabric under construction: gate locations and channel cells
/// keyed by position, each with the ports opened so far. Heuristics grow a
/// ChannelGrid and convert it to a Layout for scheduling.
class ChannelGrid {
public:
  struct Cell {
    PortMask ports = 0;
    bool gate = false;
    std::string name;
  };

  /// Throws std::invalid_argument if the position is already used.
  void add_gate(Position p, std::string name = {});
  /// Adds a channel cell with no ports yet; no-op if the position is used.
  void add_channel(Position p);
  [[nodiscard]] bool contains(Position p) const { return cells_.contains(p); }
  [[nodiscard]] bool is_gate(Position p) const;
  [[nodiscard]] const Cell* find(Position p) const;
  [[nodiscard]] const std::map<Position, Cell>& cells() const { return cells_; }
  /// Gate positions in row-major order.
  [[nodiscard]] std::vector<Position> gates() const;

  /// Opens matching ports between two adjacent positions, creating channel
  /// cells as needed. Throws std::invalid_argument if they are not adjacent.
  void link(Position a, Position b);
  /// Opens one side of an existing cell without touching the neighbour.
  void open_port(Position p, Direction d);
  /// Links consecutive positions of a path.
  void link_path(const std::vector<Position>& path);
  /// Removes a cell and closes the neighbours' ports facing it.
  void remove(Position p);
  /// Repeatedly removes channel cells with fewer than two ports.
  void prune();

  /// Converts to macroblocks. A gate with no ports opens toward its first
  /// free side in N, E, S, W order, or links to its northern-most neighbour
  /// when surrounded. Throws LayoutError for cells no library piece realises
  /// (a channel end, or a gate with ports on two adjacent sides).
  [[nodiscard]] Layout to_layout() const;

private:
  std::map<Position, Cell> cells_;
};

/// Joins gate locations `a` and `b` with a channel: an unconnected gate
/// opens toward its partner, then the access cells are linked by an
/// x-then-y path, a y-then-x path, or the shortest detour around gates.
/// Crossed channels gain the extra ports and become intersections.
/// Returns false and leaves the grid unchanged if the two are already
/// connected. Throws std::runtime_error when no path exists.
bool connect(ChannelGrid& grid, Position a, Position b);

/// True if a movement path joins the two cells through matched ports.
[[nodiscard]] bool connected(const ChannelGrid& grid, Position a, Position b);

/// Builds a ChannelGrid from a layout, inverting to_layout.
[[nodiscard]] ChannelGrid channel_grid_from(const Layout& layout);

} // namespace qpnr
