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
#include "qpnr/scheduler.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qpnr {

/// A w x h arrangement of macroblocks, row-major, empty positions allowed.
/// Pieces always use a canonical rotation.
struct Cell {
  int width = 0;
  int height = 0;
  std::vector<std::optional<KindRotation>> pieces;

  [[nodiscard]] const std::optional<KindRotation>& at(int col, int row) const {
    return pieces.at(static_cast<std::size_t>(row * width + col));
  }
  /// Tokens SC, GC, TU, T3, X4, DE followed by rotation / 90, "--" for an
  /// empty position; "," between columns and "/" between rows.
  [[nodiscard]] std::string encoding() const;
  [[nodiscard]] int gate_count() const;

  friend bool operator==(const Cell& a, const Cell& b) {
    return a.encoding() == b.encoding();
  }
};

/// Throws std::invalid_argument on a malformed or ragged encoding.
[[nodiscard]] Cell parse_cell(std::string_view encoding);

/// The four-way/two-gate 2x2 reference cell.
[[nodiscard]] Cell qpos_cell();

/// Every port meets a matching port when the cell tiles against copies of
/// itself, and nothing faces an open port with a closed side.
[[nodiscard]] bool ports_match_when_tiled(const Cell& cell);
/// Rules above plus: at least one gate, and 2x2 and 3x3 tilings connected.
[[nodiscard]] bool cell_valid(const Cell& cell);

/// All valid cells of one size in increasing canonical order.
[[nodiscard]] std::vector<Cell> enumerate_valid_cells(int width, int height);
/// Streaming form; the callback returns false to stop early.
void for_each_valid_cell(int width, int height,
                         const std::function<bool(const Cell&)>& visit);

[[nodiscard]] Layout tile(const Cell& cell, int nx, int ny);

struct Tiling {
  int nx = 1;
  int ny = 1;
};
/// Near-square tiling with at least one cell per qubit.
[[nodiscard]] Tiling tiling_for(std::size_t qubits);

/// Qubit k on the first gate block of cell k, cells in row-major order.
/// Throws std::invalid_argument if there are fewer cells than qubits.
[[nodiscard]] std::vector<BlockId> systematic_placement(const Cell& cell,
                                                        Tiling tiling,
                                                        const Layout& layout,
                                                        std::size_t qubits);

/// `count` injective placements onto gate blocks, each from its own
/// generator seeded by (seed, index). Throws std::invalid_argument if the
/// layout has fewer gate blocks than qubits.
[[nodiscard]] std::vector<std::vector<BlockId>>
random_placements(const Layout& layout, std::size_t qubits, int count,
                  std::uint64_t seed);

struct CellStats {
  std::string encoding;
  Time min_latency = kUnreachable;
  Time max_latency = 0;
  double mean_latency = 0.0;
  int evaluated = 0;
  int deadlocks = 0;
  long area = 0;
  std::vector<BlockId> best_placement;

  [[nodiscard]] bool feasible() const { return evaluated > deadlocks; }
};

struct GridOptions {
  std::vector<std::pair<int, int>> cell_sizes{{2, 2}};
  int random_placements = 10;
  std::uint64_t seed = 1;
  /// Worker threads; 0 or 1 runs serially.
  unsigned threads = 1;
  /// Evaluate at most this many evenly spaced cells per size; 0 means all.
  std::size_t sample = 0;
  SchedulerOptions scheduler;
};

/// Systematic plus random placements of one cell, scheduled without gate
/// annotations.
[[nodiscard]] CellStats evaluate_cell(const InstructionSequence& seq,
                                      const Cell& cell,
                                      const TechnologyParams& tech,
                                      const GridOptions& options);

struct GridSearchResult {
  Cell best_cell;
  Tiling tiling;
  Layout best_layout;
  std::vector<BlockId> best_placement;
  Time best_latency = kUnreachable;
  long best_area = 0;
  std::vector<CellStats> per_cell;
};

/// Argmin over (latency, area, encoding) of all evaluated cells. Throws
/// std::runtime_error if every candidate deadlocks.
[[nodiscard]] GridSearchResult grid_search(const InstructionSequence& seq,
                                           const TechnologyParams& tech,
                                           const GridOptions& options);

/// Same search over an explicit candidate list.
[[nodiscard]] GridSearchResult grid_search(const InstructionSequence& seq,
                                           const std::vector<Cell>& cells,
                                           const TechnologyParams& tech,
                                           const GridOptions& options);

} // namespace qpnr
