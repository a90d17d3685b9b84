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

#include "qpnr/render.hpp"

#include <map>
#include <sstream>

namespace qpnr {

namespace {

char centre(const PlacedMacroblock& b) {
  switch (b.kind) {
  case MacroblockKind::GateChannel:
    return 'G';
  case MacroblockKind::DeadEnd:
    return 'D';
  case MacroblockKind::FourWayIntersection:
    return '+';
  case MacroblockKind::ThreeWayIntersection:
    return 'T';
  case MacroblockKind::Turn:
    return 'L';
  case MacroblockKind::StraightChannel:
    return has_port(b.ports(), Direction::North) ? '|' : '-';
  }
  return '?';
}

} // namespace

std::string render_ascii(const Layout& layout) {
  if (layout.empty()) {
    return {};
  }
  const auto box = bounding_box(layout);
  const int w = box.max.col - box.min.col + 1;
  const int h = box.max.row - box.min.row + 1;
  std::vector<std::string> canvas(static_cast<std::size_t>(3 * h),
                                  std::string(static_cast<std::size_t>(3 * w), ' '));
  for (const auto& b : layout.blocks()) {
    const auto x = static_cast<std::size_t>(3 * (b.position.col - box.min.col) + 1);
    const auto y = static_cast<std::size_t>(3 * (b.position.row - box.min.row) + 1);
    canvas[y][x] = centre(b);
    const PortMask p = b.ports();
    if (has_port(p, Direction::North)) {
      canvas[y - 1][x] = '|';
    }
    if (has_port(p, Direction::South)) {
      canvas[y + 1][x] = '|';
    }
    if (has_port(p, Direction::West)) {
      canvas[y][x - 1] = '-';
    }
    if (has_port(p, Direction::East)) {
      canvas[y][x + 1] = '-';
    }
  }
  std::string out;
  for (auto& line : canvas) {
    line.erase(line.find_last_not_of(' ') + 1);
    out += line + "\n";
  }
  return out;
}

std::string render_svg(const Layout& layout, const std::vector<BlockId>& initial) {
  constexpr int kCell = 30;
  constexpr int kHalf = kCell / 2;
  std::ostringstream os;
  if (layout.empty()) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"0\" height=\"0\"/>\n";
    return os.str();
  }
  const auto box = bounding_box(layout);
  const int w = (box.max.col - box.min.col + 1) * kCell;
  const int h = (box.max.row - box.min.row + 1) * kCell;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
     << "\" viewBox=\"0 0 " << w << " " << h << "\" font-family=\"monospace\" font-size=\"8\">\n";
  std::map<BlockId, std::size_t> qubit_at;
  for (std::size_t q = 0; q < initial.size(); ++q) {
    qubit_at[initial[q]] = q;
  }
  for (const auto& b : layout.blocks()) {
    const int x = (b.position.col - box.min.col) * kCell;
    const int y = (b.position.row - box.min.row) * kCell;
    os << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << kCell << "\" height=\""
       << kCell << "\" fill=\"" << (b.has_gate() ? "#f4d58d" : "#ffffff")
       << "\" stroke=\"#999999\"/>\n";
    const int cx = x + kHalf;
    const int cy = y + kHalf;
    for (auto d : kDirections) {
      if (!has_port(b.ports(), d)) {
        continue;
      }
      const Position step = Position{0, 0}.step(d);
      os << "  <line x1=\"" << cx << "\" y1=\"" << cy << "\" x2=\"" << cx + step.col * kHalf
         << "\" y2=\"" << cy + step.row * kHalf << "\" stroke=\"#2b5d8a\" stroke-width=\"4\"/>\n";
    }
    if (b.has_gate()) {
      os << "  <circle cx=\"" << cx << "\" cy=\"" << cy
         << "\" r=\"6\" fill=\"#c0392b\"/>\n  <text x=\"" << x + 2 << "\" y=\"" << y + 9
         << "\">" << b.name << "</text>\n";
    }
    if (auto it = qubit_at.find(b.id); it != qubit_at.end()) {
      os << "  <text x=\"" << cx - 3 << "\" y=\"" << y + kCell - 3 << "\" fill=\"#000000\">q"
         << it->second << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

} // namespace qpnr
