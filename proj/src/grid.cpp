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

#include "qpnr/grid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace qpnr {

namespace {

struct Variant {
  std::optional<KindRotation> piece;
  PortMask ports = 0;
};

const std::vector<Variant>& variants() {
  static const std::vector<Variant> all = [] {
    std::vector<Variant> out{{std::nullopt, 0}};
    for (auto kind : kMacroblockKinds) {
      for (int r : canonical_rotations(kind)) {
        out.push_back({KindRotation{kind, r}, rotated_ports(kind, r)});
      }
    }
    return out;
  }();
  return all;
}

constexpr std::array<std::string_view, 6> kTokens{"SC", "GC", "TU", "T3", "X4", "DE"};

PortMask ports_of(const std::optional<KindRotation>& p) {
  return p ? rotated_ports(p->kind, p->rotation) : 0;
}

// Two facing sides agree when both are present with equal openness, or no
// present side is open.
bool sides_agree(const std::optional<KindRotation>& a, Direction da,
                 const std::optional<KindRotation>& b) {
  const bool open_a = a && has_port(ports_of(a), da);
  const bool open_b = b && has_port(ports_of(b), opposite(da));
  if (a && b) {
    return open_a == open_b;
  }
  return !open_a && !open_b;
}

bool tiles_connected(const Cell& cell, int n) {
  const auto layout = tile(cell, n, n);
  if (layout.empty() || !layout.valid()) {
    return false;
  }
  return derive_movement_graph(layout, TechnologyParams{}).num_components() == 1;
}

} // namespace

std::string Cell::encoding() const {
  std::string out;
  for (int r = 0; r < height; ++r) {
    if (r > 0) {
      out += '/';
    }
    for (int c = 0; c < width; ++c) {
      if (c > 0) {
        out += ',';
      }
      const auto& p = at(c, r);
      if (!p) {
        out += "--";
      } else {
        out += kTokens[static_cast<std::size_t>(p->kind)];
        out += static_cast<char>('0' + p->rotation / 90);
      }
    }
  }
  return out;
}

int Cell::gate_count() const {
  return static_cast<int>(std::count_if(pieces.begin(), pieces.end(), [](const auto& p) {
    return p && kind_has_gate(p->kind);
  }));
}

Cell parse_cell(std::string_view encoding) {
  Cell cell;
  std::vector<std::vector<std::string>> rows(1);
  std::string token;
  auto flush = [&] {
    rows.back().push_back(token);
    token.clear();
  };
  for (char ch : encoding) {
    if (ch == ',') {
      flush();
    } else if (ch == '/') {
      flush();
      rows.emplace_back();
    } else {
      token += ch;
    }
  }
  flush();
  cell.height = static_cast<int>(rows.size());
  cell.width = static_cast<int>(rows.front().size());
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != cell.width) {
      throw std::invalid_argument("ragged cell encoding");
    }
    for (const auto& t : row) {
      if (t == "--") {
        cell.pieces.emplace_back();
        continue;
      }
      if (t.size() != 3 || t[2] < '0' || t[2] > '3') {
        throw std::invalid_argument("bad cell token " + t);
      }
      auto it = std::find(kTokens.begin(), kTokens.end(), t.substr(0, 2));
      if (it == kTokens.end()) {
        throw std::invalid_argument("bad cell token " + t);
      }
      cell.pieces.push_back(KindRotation{
          static_cast<MacroblockKind>(it - kTokens.begin()), (t[2] - '0') * 90});
    }
  }
  return cell;
}

Cell qpos_cell() { return parse_cell("X40,GC0/GC1,--"); }

bool ports_match_when_tiled(const Cell& cell) {
  for (int r = 0; r < cell.height; ++r) {
    for (int c = 0; c < cell.width; ++c) {
      const auto& me = cell.at(c, r);
      const auto& east = cell.at((c + 1) % cell.width, r);
      const auto& south = cell.at(c, (r + 1) % cell.height);
      if (!sides_agree(me, Direction::East, east) ||
          !sides_agree(me, Direction::South, south)) {
        return false;
      }
    }
  }
  return true;
}

bool cell_valid(const Cell& cell) {
  return cell.gate_count() > 0 && ports_match_when_tiled(cell) &&
         tiles_connected(cell, 2) && tiles_connected(cell, 3);
}

void for_each_valid_cell(int width, int height,
                         const std::function<bool(const Cell&)>& visit) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument("cell dimensions must be positive");
  }
  const auto& vs = variants();
  Cell cell;
  cell.width = width;
  cell.height = height;
  cell.pieces.assign(static_cast<std::size_t>(width * height), std::nullopt);
  const int total = width * height;
  bool stop = false;

  std::function<void(int)> place = [&](int index) {
    if (stop) {
      return;
    }
    if (index == total) {
      if (cell.gate_count() > 0 && tiles_connected(cell, 2) &&
          tiles_connected(cell, 3)) {
        stop = !visit(cell);
      }
      return;
    }
    const int c = index % width;
    const int r = index / width;
    auto& slot = cell.pieces[static_cast<std::size_t>(index)];
    for (const auto& v : vs) {
      slot = v.piece;
      if (c > 0 && !sides_agree(cell.at(c - 1, r), Direction::East, slot)) {
        continue;
      }
      if (r > 0 && !sides_agree(cell.at(c, r - 1), Direction::South, slot)) {
        continue;
      }
      if (c == width - 1 && !sides_agree(slot, Direction::East, cell.at(0, r))) {
        continue;
      }
      if (r == height - 1 && !sides_agree(slot, Direction::South, cell.at(c, 0))) {
        continue;
      }
      place(index + 1);
      if (stop) {
        return;
      }
    }
    slot.reset();
  };
  place(0);
}

std::vector<Cell> enumerate_valid_cells(int width, int height) {
  std::vector<Cell> out;
  for_each_valid_cell(width, height, [&](const Cell& c) {
    out.push_back(c);
    return true;
  });
  return out;
}

Layout tile(const Cell& cell, int nx, int ny) {
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("tiling counts must be positive");
  }
  std::vector<BlockSpec> specs;
  for (int ty = 0; ty < ny; ++ty) {
    for (int tx = 0; tx < nx; ++tx) {
      for (int r = 0; r < cell.height; ++r) {
        for (int c = 0; c < cell.width; ++c) {
          if (const auto& p = cell.at(c, r)) {
            specs.push_back({p->kind,
                             {tx * cell.width + c, ty * cell.height + r},
                             p->rotation,
                             {}});
          }
        }
      }
    }
  }
  return Layout(std::move(specs));
}

Tiling tiling_for(std::size_t qubits) {
  const auto q = std::max<std::size_t>(qubits, 1);
  auto nx = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(q))));
  while (nx * nx < q) {
    ++nx;
  }
  while (nx > 1 && (nx - 1) * (nx - 1) >= q) {
    --nx;
  }
  const std::size_t ny = (q + nx - 1) / nx;
  return {static_cast<int>(nx), static_cast<int>(ny)};
}

std::vector<BlockId> systematic_placement(const Cell& cell, Tiling tiling,
                                          const Layout& layout,
                                          std::size_t qubits) {
  if (qubits > static_cast<std::size_t>(tiling.nx * tiling.ny)) {
    throw std::invalid_argument("fewer cells than qubits");
  }
  std::optional<Position> first;
  for (int r = 0; r < cell.height && !first; ++r) {
    for (int c = 0; c < cell.width && !first; ++c) {
      const auto& p = cell.at(c, r);
      if (p && kind_has_gate(p->kind)) {
        first = Position{c, r};
      }
    }
  }
  if (!first) {
    throw std::invalid_argument("cell has no gate location");
  }
  std::vector<BlockId> out;
  for (std::size_t k = 0; k < qubits; ++k) {
    const int tx = static_cast<int>(k) % tiling.nx;
    const int ty = static_cast<int>(k) / tiling.nx;
    const auto b = layout.at(
        {tx * cell.width + first->col, ty * cell.height + first->row});
    if (!b) {
      throw std::invalid_argument("layout does not match the cell tiling");
    }
    out.push_back(*b);
  }
  return out;
}

std::vector<std::vector<BlockId>> random_placements(const Layout& layout,
                                                    std::size_t qubits,
                                                    int count,
                                                    std::uint64_t seed) {
  const auto& gates = layout.gate_blocks();
  if (gates.size() < qubits) {
    throw std::invalid_argument("fewer gate locations than qubits");
  }
  std::vector<std::vector<BlockId>> out;
  for (int k = 0; k < count; ++k) {
    std::seed_seq sequence{static_cast<std::uint32_t>(seed),
                           static_cast<std::uint32_t>(seed >> 32),
                           static_cast<std::uint32_t>(k)};
    std::mt19937_64 rng(sequence);
    auto pool = gates;
    // Partial Fisher-Yates with plain modulo keeps results identical across
    // standard library implementations.
    for (std::size_t i = 0; i < qubits; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(qubits);
    out.push_back(std::move(pool));
  }
  return out;
}

CellStats evaluate_cell(const InstructionSequence& seq, const Cell& cell,
                        const TechnologyParams& tech,
                        const GridOptions& options) {
  CellStats stats;
  stats.encoding = cell.encoding();
  const auto tiling = tiling_for(seq.num_qubits());
  const auto layout = tile(cell, tiling.nx, tiling.ny);
  stats.area = area(layout);
  const auto graph = derive_movement_graph(layout, tech);
  const auto priorities = critical_path_priorities(build_dataflow(seq), seq, tech);

  auto placements = random_placements(layout, seq.num_qubits(),
                                      options.random_placements, options.seed);
  placements.insert(placements.begin(),
                    systematic_placement(cell, tiling, layout, seq.num_qubits()));
  double sum = 0.0;
  for (const auto& placement : placements) {
    ++stats.evaluated;
    const auto result = schedule(seq, layout, graph, placement, priorities,
                                 std::nullopt, options.scheduler);
    const auto* s = std::get_if<Schedule>(&result);
    if (!s) {
      ++stats.deadlocks;
      continue;
    }
    sum += static_cast<double>(s->total_latency);
    stats.max_latency = std::max(stats.max_latency, s->total_latency);
    if (s->total_latency < stats.min_latency) {
      stats.min_latency = s->total_latency;
      stats.best_placement = placement;
    }
  }
  if (stats.feasible()) {
    stats.mean_latency = sum / (stats.evaluated - stats.deadlocks);
  }
  return stats;
}

namespace {

std::vector<Cell> sample_evenly(std::vector<Cell> cells, std::size_t sample) {
  if (sample == 0 || cells.size() <= sample) {
    return cells;
  }
  std::vector<Cell> out;
  for (std::size_t k = 0; k < sample; ++k) {
    out.push_back(cells[k * cells.size() / sample]);
  }
  return out;
}

} // namespace

GridSearchResult grid_search(const InstructionSequence& seq,
                             const TechnologyParams& tech,
                             const GridOptions& options) {
  if (options.cell_sizes.empty()) {
    throw std::invalid_argument("no cell sizes requested");
  }
  std::vector<Cell> cells;
  for (auto [w, h] : options.cell_sizes) {
    auto some = sample_evenly(enumerate_valid_cells(w, h), options.sample);
    cells.insert(cells.end(), some.begin(), some.end());
  }
  return grid_search(seq, cells, tech, options);
}

GridSearchResult grid_search(const InstructionSequence& seq,
                             const std::vector<Cell>& cells,
                             const TechnologyParams& tech,
                             const GridOptions& options) {
  std::vector<CellStats> stats(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) {
      try {
        stats[k] = evaluate_cell(seq, cells[k], tech, options);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
      }
    }
  };
  const unsigned threads = std::max(1U, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) {
      t.join();
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  GridSearchResult result;
  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!stats[k].feasible()) {
      continue;
    }
    if (!best || std::tuple(stats[k].min_latency, stats[k].area, stats[k].encoding) <
                     std::tuple(stats[*best].min_latency, stats[*best].area,
                                stats[*best].encoding)) {
      best = k;
    }
  }
  if (!best) {
    throw std::runtime_error("every grid candidate deadlocked");
  }
  result.best_cell = cells[*best];
  result.tiling = tiling_for(seq.num_qubits());
  result.best_layout = tile(result.best_cell, result.tiling.nx, result.tiling.ny);
  result.best_placement = stats[*best].best_placement;
  result.best_latency = stats[*best].min_latency;
  result.best_area = stats[*best].area;
  result.per_cell = std::move(stats);
  return result;
}

} // namespace qpnr
