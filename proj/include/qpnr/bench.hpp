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

#include "qpnr/config.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace qpnr {

struct BenchOptions {
  /// grid (QPOS cell plus the cell search), qpos, greedy, dataflow,
  /// dataflow-fold, dataflow-g2, dataflow-fold-g2.
  std::vector<std::string> heuristics{"grid", "greedy", "dataflow"};
  /// Benchmark names; empty means the whole suite.
  std::vector<std::string> circuits;
  std::uint64_t seed = 1;
  /// Worker threads across (circuit, heuristic) jobs; 0 means one per core.
  unsigned threads = 1;
  Config config;
};

struct BenchRow {
  std::string circuit;
  std::size_t qubits = 0;
  std::size_t gates = 0;
  std::string heuristic;
  /// ok, or deadlock when the heuristic found no schedule.
  std::string status = "ok";
  Time latency = 0;
  long area = 0;
};

/// Throws std::invalid_argument on an unknown heuristic or circuit name.
[[nodiscard]] std::vector<BenchRow> run_bench(const BenchOptions& options);

/// Header `circuit,qubits,gates,heuristic,status,latency_us,area`, rows in
/// job order. Identical for any thread count.
[[nodiscard]] std::string bench_csv(const std::vector<BenchRow>& rows);

} // namespace qpnr
