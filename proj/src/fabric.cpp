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

#include <algorithm>
#include <bit>
#include <sstream>

namespace qpnr {

char direction_letter(Direction d) {
  static constexpr std::array<char, 4> letters{'N', 'E', 'S', 'W'};
  return letters[static_cast<std::size_t>(d)];
}

int port_count(PortMask mask) { return std::popcount(static_cast<unsigned>(mask)); }

Position Position::step(Direction d, int n) const {
  switch (d) {
  case Direction::North:
    return {col, row - n};
  case Direction::East:
    return {col + n, row};
  case Direction::South:
    return {col, row + n};
  case Direction::West:
    return {col - n, row};
  }
  return *this;
}

int manhattan(Position a, Position b) {
  return std::abs(a.col - b.col) + std::abs(a.row - b.row);
}

namespace {

constexpr std::array<std::string_view, 6> kKindNames{
    "StraightChannel",      "GateChannel",         "Turn",
    "ThreeWayIntersection", "FourWayIntersection", "DeadEnd"};

int normalize_rotation(int rotation) { return ((rotation % 360) + 360) % 360; }

} // namespace

std::string_view kind_name(MacroblockKind kind) {
  return kKindNames.at(static_cast<std::size_t>(kind));
}

std::optional<MacroblockKind> parse_kind_name(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) {
      return static_cast<MacroblockKind>(i);
    }
  }
  return std::nullopt;
}

bool kind_has_gate(MacroblockKind kind) {
  return kind == MacroblockKind::GateChannel || kind == MacroblockKind::DeadEnd;
}

PortMask base_ports(MacroblockKind kind) {
  using enum Direction;
  switch (kind) {
  case MacroblockKind::StraightChannel:
  case MacroblockKind::GateChannel:
    return port_bit(East) | port_bit(West);
  case MacroblockKind::Turn:
    return port_bit(East) | port_bit(South);
  case MacroblockKind::ThreeWayIntersection:
    return port_bit(East) | port_bit(South) | port_bit(West);
  case MacroblockKind::FourWayIntersection:
    return 0x0F;
  case MacroblockKind::DeadEnd:
    return port_bit(East);
  }
  return 0;
}

PortMask rotated_ports(MacroblockKind kind, int rotation) {
  const int quarters = normalize_rotation(rotation) / 90;
  const PortMask base = base_ports(kind);
  PortMask out = 0;
  for (auto d : kDirections) {
    if (has_port(base, d)) {
      out |= port_bit(rotate_cw(d, quarters));
    }
  }
  return out;
}

std::vector<int> canonical_rotations(MacroblockKind kind) {
  std::vector<int> out;
  std::vector<PortMask> seen;
  for (int r = 0; r < 360; r += 90) {
    const auto m = rotated_ports(kind, r);
    if (std::find(seen.begin(), seen.end(), m) == seen.end()) {
      seen.push_back(m);
      out.push_back(r);
    }
  }
  return out;
}

std::optional<KindRotation> piece_for_ports(PortMask mask, bool gate) {
  for (auto kind : kMacroblockKinds) {
    if (kind_has_gate(kind) != gate) {
      continue;
    }
    for (int r : canonical_rotations(kind)) {
      if (rotated_ports(kind, r) == mask) {
        return KindRotation{kind, r};
      }
    }
  }
  return std::nullopt;
}

Layout::Layout(std::vector<BlockSpec> specs) {
  std::sort(specs.begin(), specs.end(),
            [](const auto& a, const auto& b) { return a.position < b.position; });
  blocks_.reserve(specs.size());
  for (auto& s : specs) {
    if (s.rotation % 90 != 0) {
      throw LayoutError("rotation must be a multiple of 90", {s.position});
    }
    const BlockId id = static_cast<BlockId>(blocks_.size());
    if (!index_.emplace(s.position, id).second) {
      throw LayoutError("two macroblocks at one position", {s.position});
    }
    PlacedMacroblock b;
    b.kind = s.kind;
    b.position = s.position;
    b.rotation = normalize_rotation(s.rotation);
    b.id = id;
    if (b.has_gate()) {
      b.name = s.name.empty() ? "G" + std::to_string(s.position.col) + "_" +
                                    std::to_string(s.position.row)
                              : std::move(s.name);
      if (!names_.emplace(b.name, id).second) {
        throw LayoutError("duplicate gate name " + b.name, {s.position});
      }
      gates_.push_back(id);
    }
    blocks_.push_back(std::move(b));
  }
}

std::optional<BlockId> Layout::at(Position p) const {
  auto it = index_.find(p);
  if (it == index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<BlockId> Layout::find_gate(std::string_view name) const {
  auto it = names_.find(name);
  if (it == names_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::vector<Position> Layout::port_mismatches() const {
  std::vector<Position> bad;
  for (const auto& b : blocks_) {
    const auto ports = b.ports();
    // Each pair is inspected from its east or south member only.
    for (auto d : {Direction::West, Direction::North}) {
      auto other = at(b.position.step(d));
      if (!other) {
        continue;
      }
      const bool mine = has_port(ports, d);
      const bool theirs = has_port(block(*other).ports(), opposite(d));
      if (mine != theirs) {
        bad.push_back(b.position);
        bad.push_back(block(*other).position);
      }
    }
  }
  std::sort(bad.begin(), bad.end());
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  return bad;
}

std::vector<BlockSpec> Layout::specs() const {
  std::vector<BlockSpec> out;
  out.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    out.push_back({b.kind, b.position, b.rotation, b.name});
  }
  return out;
}

Layout Layout::rotated(int quarter_turns) const {
  const int q = ((quarter_turns % 4) + 4) % 4;
  auto specs_out = specs();
  for (auto& s : specs_out) {
    for (int i = 0; i < q; ++i) {
      s.position = {-s.position.row, s.position.col};
    }
    s.rotation = normalize_rotation(s.rotation + 90 * q);
    // Re-canonicalize symmetric pieces so equal port sets print identically.
    const auto piece = piece_for_ports(rotated_ports(s.kind, s.rotation),
                                       kind_has_gate(s.kind));
    if (piece && piece->kind == s.kind) {
      s.rotation = piece->rotation;
    }
  }
  return Layout(std::move(specs_out));
}

BoundingBox bounding_box(const Layout& layout) {
  if (layout.empty()) {
    throw LayoutError("bounding box of an empty layout");
  }
  BoundingBox box{layout.blocks().front().position,
                  layout.blocks().front().position};
  for (const auto& b : layout.blocks()) {
    box.min.col = std::min(box.min.col, b.position.col);
    box.min.row = std::min(box.min.row, b.position.row);
    box.max.col = std::max(box.max.col, b.position.col);
    box.max.row = std::max(box.max.row, b.position.row);
  }
  return box;
}

long area(const Layout& layout) {
  if (layout.empty()) {
    throw LayoutError("area of an empty layout");
  }
  const auto box = bounding_box(layout);
  return static_cast<long>(box.width()) * box.height();
}

std::string write_layout(const Layout& layout) {
  std::ostringstream out;
  for (const auto& b : layout.blocks()) {
    out << '(' << b.position.col << ',' << b.position.row << ") "
        << kind_name(b.kind) << ' ' << b.rotation;
    if (b.has_gate()) {
      out << ' ' << b.name;
    }
    out << '\n';
  }
  return out.str();
}

Layout read_layout(std::string_view text) {
  std::vector<BlockSpec> specs;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    BlockSpec s;
    char lp = 0;
    char comma = 0;
    char rp = 0;
    std::string kind;
    std::istringstream ls(line);
    if (!(ls >> lp >> s.position.col >> comma >> s.position.row >> rp >> kind >>
          s.rotation) ||
        lp != '(' || comma != ',' || rp != ')') {
      throw LayoutError("layout line " + std::to_string(line_no) + ": malformed");
    }
    const auto k = parse_kind_name(kind);
    if (!k) {
      throw LayoutError("layout line " + std::to_string(line_no) +
                        ": unknown kind " + kind);
    }
    s.kind = *k;
    ls >> s.name;
    specs.push_back(std::move(s));
  }
  return Layout(std::move(specs));
}

std::optional<Direction> MovementGraph::direction_between(BlockId from,
                                                          BlockId to) const {
  for (auto d : kDirections) {
    if (neighbor(from, d) == to) {
      return d;
    }
  }
  return std::nullopt;
}

Time MovementGraph::edge_latency(BlockId a, BlockId b) const {
  if (!direction_between(a, b)) {
    throw std::out_of_range("no edge between blocks");
  }
  return tech_.t_straight;
}

std::vector<MovementGraph::Edge> MovementGraph::edges() const {
  std::vector<Edge> out;
  for (std::size_t b = 0; b < neighbors_.size(); ++b) {
    for (BlockId n : neighbors_[b]) {
      if (n != kNone) {
        out.push_back({static_cast<BlockId>(b), n, tech_.t_straight});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.from, a.to) < std::pair(b.from, b.to);
  });
  return out;
}

std::vector<int> MovementGraph::component_labels() const {
  std::vector<int> label(size(), -1);
  int next = 0;
  std::vector<BlockId> stack;
  for (std::size_t start = 0; start < size(); ++start) {
    if (label[start] != -1) {
      continue;
    }
    label[start] = next;
    stack.push_back(static_cast<BlockId>(start));
    while (!stack.empty()) {
      const BlockId b = stack.back();
      stack.pop_back();
      for (BlockId n : neighbors_[static_cast<std::size_t>(b)]) {
        if (n != kNone && label[static_cast<std::size_t>(n)] == -1) {
          label[static_cast<std::size_t>(n)] = next;
          stack.push_back(n);
        }
      }
    }
    ++next;
  }
  return label;
}

std::size_t MovementGraph::num_components() const {
  const auto label = component_labels();
  return label.empty() ? 0
                       : static_cast<std::size_t>(
                             *std::max_element(label.begin(), label.end()) + 1);
}

MovementGraph derive_movement_graph(const Layout& layout,
                                    const TechnologyParams& tech) {
  tech.validate();
  if (auto bad = layout.port_mismatches(); !bad.empty()) {
    std::string msg = "interior port mismatch at";
    for (const auto& p : bad) {
      msg += " (" + std::to_string(p.col) + "," + std::to_string(p.row) + ")";
    }
    throw LayoutError(msg, std::move(bad));
  }
  MovementGraph g;
  g.tech_ = tech;
  g.neighbors_.assign(layout.size(), {MovementGraph::kNone, MovementGraph::kNone,
                                      MovementGraph::kNone, MovementGraph::kNone});
  for (const auto& b : layout.blocks()) {
    const auto ports = b.ports();
    for (auto d : kDirections) {
      if (!has_port(ports, d)) {
        continue;
      }
      if (auto other = layout.at(b.position.step(d))) {
        g.neighbors_[static_cast<std::size_t>(b.id)][static_cast<std::size_t>(d)] =
            *other;
      }
    }
  }
  return g;
}

} // namespace qpnr
