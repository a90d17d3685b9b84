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

#include "qpnr/channel_grid.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

namespace qpnr {

namespace {

std::optional<Direction> adjacent(Position a, Position b) {
  for (auto d : kDirections) {
    if (a.step(d) == b) {
      return d;
    }
  }
  return std::nullopt;
}

std::string where(Position p) {
  return "(" + std::to_string(p.col) + "," + std::to_string(p.row) + ")";
}

std::vector<Direction> sides_toward(Position from, Position to) {
  std::vector<Direction> out;
  if (to.col != from.col) {
    out.push_back(to.col > from.col ? Direction::East : Direction::West);
  }
  if (to.row != from.row) {
    out.push_back(to.row > from.row ? Direction::South : Direction::North);
  }
  for (auto d : kDirections) {
    if (std::find(out.begin(), out.end(), d) == out.end()) {
      out.push_back(d);
    }
  }
  return out;
}

struct Access {
  Position cell;
  Direction side;
};

// Channel cell a gate is entered from: its existing port, or the first free
// side facing the partner.
Access access_cell(const ChannelGrid& grid, Position gate, Position partner) {
  const auto* c = grid.find(gate);
  for (auto d : kDirections) {
    if (has_port(c->ports, d)) {
      return {gate.step(d), d};
    }
  }
  for (auto d : sides_toward(gate, partner)) {
    if (!grid.is_gate(gate.step(d))) {
      return {gate.step(d), d};
    }
  }
  throw std::runtime_error("gate location is enclosed by other gates");
}

std::optional<std::vector<Position>> l_path(const ChannelGrid& grid, Position a,
                                            Position b, bool x_first) {
  std::vector<Position> path{a};
  Position at = a;
  auto walk_x = [&] {
    while (at.col != b.col) {
      at.col += b.col > at.col ? 1 : -1;
      path.push_back(at);
    }
  };
  auto walk_y = [&] {
    while (at.row != b.row) {
      at.row += b.row > at.row ? 1 : -1;
      path.push_back(at);
    }
  };
  if (x_first) {
    walk_x();
    walk_y();
  } else {
    walk_y();
    walk_x();
  }
  for (const auto& p : path) {
    if (grid.is_gate(p)) {
      return std::nullopt;
    }
  }
  return path;
}

std::optional<std::vector<Position>> detour_path(const ChannelGrid& grid,
                                                 Position a, Position b) {
  Position lo = a;
  Position hi = a;
  auto grow = [&](Position p) {
    lo = {std::min(lo.col, p.col), std::min(lo.row, p.row)};
    hi = {std::max(hi.col, p.col), std::max(hi.row, p.row)};
  };
  grow(b);
  for (const auto& [p, c] : grid.cells()) {
    grow(p);
  }
  lo = {lo.col - 2, lo.row - 2};
  hi = {hi.col + 2, hi.row + 2};
  std::map<Position, Position> parent;
  std::deque<Position> queue{a};
  parent.emplace(a, a);
  while (!queue.empty()) {
    const Position p = queue.front();
    queue.pop_front();
    if (p == b) {
      std::vector<Position> path{b};
      for (Position x = b; x != a;) {
        x = parent.at(x);
        path.push_back(x);
      }
      std::reverse(path.begin(), path.end());
      return path;
    }
    for (auto d : kDirections) {
      const Position n = p.step(d);
      if (n.col < lo.col || n.row < lo.row || n.col > hi.col || n.row > hi.row ||
          grid.is_gate(n) || parent.contains(n)) {
        continue;
      }
      parent.emplace(n, p);
      queue.push_back(n);
    }
  }
  return std::nullopt;
}

} // namespace

void ChannelGrid::add_gate(Position p, std::string name) {
  if (!cells_.emplace(p, Cell{0, true, std::move(name)}).second) {
    throw std::invalid_argument("position " + where(p) + " already used");
  }
}

void ChannelGrid::add_channel(Position p) { cells_.try_emplace(p); }

bool ChannelGrid::is_gate(Position p) const {
  const auto* c = find(p);
  return c != nullptr && c->gate;
}

const ChannelGrid::Cell* ChannelGrid::find(Position p) const {
  auto it = cells_.find(p);
  return it == cells_.end() ? nullptr : &it->second;
}

std::vector<Position> ChannelGrid::gates() const {
  std::vector<Position> out;
  for (const auto& [p, c] : cells_) {
    if (c.gate) {
      out.push_back(p);
    }
  }
  return out;
}

void ChannelGrid::link(Position a, Position b) {
  const auto d = adjacent(a, b);
  if (!d) {
    throw std::invalid_argument(where(a) + " and " + where(b) + " are not adjacent");
  }
  cells_[a].ports |= port_bit(*d);
  cells_[b].ports |= port_bit(opposite(*d));
}

void ChannelGrid::open_port(Position p, Direction d) {
  auto it = cells_.find(p);
  if (it == cells_.end()) {
    throw std::invalid_argument("no cell at " + where(p));
  }
  it->second.ports |= port_bit(d);
}

void ChannelGrid::link_path(const std::vector<Position>& path) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    link(path[i - 1], path[i]);
  }
}

void ChannelGrid::remove(Position p) {
  if (cells_.erase(p) == 0) {
    return;
  }
  for (auto d : kDirections) {
    if (auto it = cells_.find(p.step(d)); it != cells_.end()) {
      it->second.ports &= static_cast<PortMask>(~port_bit(opposite(d)));
    }
  }
}

void ChannelGrid::prune() {
  std::vector<Position> work;
  for (const auto& [p, c] : cells_) {
    work.push_back(p);
  }
  while (!work.empty()) {
    const Position p = work.back();
    work.pop_back();
    const auto it = cells_.find(p);
    if (it == cells_.end() || it->second.gate ||
        port_count(it->second.ports) >= 2) {
      continue;
    }
    remove(p);
    for (auto d : kDirections) {
      if (cells_.contains(p.step(d))) {
        work.push_back(p.step(d));
      }
    }
  }
}

Layout ChannelGrid::to_layout() const {
  auto cells = cells_;
  for (auto& [p, c] : cells) {
    if (!c.gate || c.ports != 0) {
      continue;
    }
    std::optional<Direction> open;
    for (auto d : kDirections) {
      if (!cells_.contains(p.step(d))) {
        open = d;
        break;
      }
    }
    if (open) {
      c.ports = port_bit(*open);
    } else {
      c.ports = port_bit(Direction::North);
      cells[p.step(Direction::North)].ports |= port_bit(Direction::South);
    }
  }
  std::vector<BlockSpec> specs;
  std::vector<Position> bad;
  for (const auto& [p, c] : cells) {
    const auto piece = piece_for_ports(c.ports, c.gate);
    if (!piece) {
      bad.push_back(p);
      continue;
    }
    specs.push_back({piece->kind, p, piece->rotation, c.name});
  }
  if (!bad.empty()) {
    throw LayoutError("no macroblock realises the ports at " + where(bad.front()),
                      bad);
  }
  return Layout(std::move(specs));
}

bool connected(const ChannelGrid& grid, Position a, Position b) {
  std::set<Position> seen{a};
  std::vector<Position> stack{a};
  while (!stack.empty()) {
    const Position p = stack.back();
    stack.pop_back();
    if (p == b) {
      return true;
    }
    const auto* c = grid.find(p);
    if (c == nullptr) {
      continue;
    }
    for (auto d : kDirections) {
      const Position n = p.step(d);
      const auto* o = grid.find(n);
      if (has_port(c->ports, d) && o != nullptr &&
          has_port(o->ports, opposite(d)) && seen.insert(n).second) {
        stack.push_back(n);
      }
    }
  }
  return false;
}

bool connect(ChannelGrid& grid, Position a, Position b) {
  if (connected(grid, a, b)) {
    return false;
  }
  const Access from = access_cell(grid, a, b);
  const Access to = access_cell(grid, b, a);
  auto path = l_path(grid, from.cell, to.cell, true);
  if (!path) {
    path = l_path(grid, from.cell, to.cell, false);
  }
  if (!path) {
    path = detour_path(grid, from.cell, to.cell);
  }
  if (!path) {
    throw std::runtime_error("no channel route between gate locations");
  }
  grid.link(a, from.cell);
  grid.link_path(*path);
  grid.link(to.cell, b);
  return true;
}

ChannelGrid channel_grid_from(const Layout& layout) {
  ChannelGrid grid;
  for (const auto& b : layout.blocks()) {
    if (b.has_gate()) {
      grid.add_gate(b.position, b.name);
    }
  }
  for (const auto& b : layout.blocks()) {
    if (!b.has_gate()) {
      grid.add_channel(b.position);
    }
    for (auto d : kDirections) {
      if (has_port(b.ports(), d)) {
        grid.open_port(b.position, d);
      }
    }
  }
  return grid;
}

} // namespace qpnr
