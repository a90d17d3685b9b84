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

#include "qpnr/bench.hpp"

#include "qpnr/benchmarks.hpp"

#include <algorithm>
#include <atomic>
#include <functional>
#include <sstream>
#include <thread>

namespace qpnr {

namespace {

struct Job {
  const Benchmark* bench;
  std::string heuristic;
};

BenchRow run_job(const Job& job, const BenchOptions& options) {
  const auto& seq = job.bench->circuit;
  BenchRow row{job.bench->name, seq.num_qubits(), seq.size(), job.heuristic, "ok", 0, 0};
  const auto& tech = options.config.tech;
  GridOptions grid = options.config.grid_options();
  grid.seed = options.seed;
  grid.threads = 1;
  try {
    if (job.heuristic == "qpos") {
      const auto stats = evaluate_cell(seq, qpos_cell(), tech, grid);
      if (!stats.feasible()) {
        row.status = "deadlock";
      } else {
        row.latency = stats.min_latency;
        row.area = stats.area;
      }
    } else if (job.heuristic == "grid") {
      const auto result = grid_search(seq, tech, grid);
      row.latency = result.best_latency;
      row.area = result.best_area;
    } else if (job.heuristic == "greedy") {
      const auto result = greedy_layout(seq, tech, options.config.greedy_options());
      row.latency = result.schedule.total_latency;
      row.area = area(result.layout);
    } else {
      auto df_options = options.config.dataflow_options();
      df_options.fold = job.heuristic.find("fold") != std::string::npos;
      df_options.global_channels = job.heuristic.ends_with("g2") ? 2 : 1;
      const auto df = build_dataflow(seq);
      const auto result = dataflow_layout(seq, df, tech, df_options);
      row.latency = result.schedule.total_latency;
      row.area = area(result.layout);
    }
  } catch (const GreedyError&) {
    row.status = "deadlock";
  } catch (const DataflowError&) {
    row.status = "deadlock";
  } catch (const std::runtime_error&) {
    row.status = "deadlock";
  }
  return row;
}

} // namespace

std::vector<BenchRow> run_bench(const BenchOptions& options) {
  static const std::vector<std::string> known{"qpos",          "grid",        "greedy",
                                              "dataflow",      "dataflow-fold", "dataflow-g2",
                                              "dataflow-fold-g2"};
  std::vector<std::string> heuristics;
  for (const auto& h : options.heuristics) {
    if (h == "grid") {
      heuristics.push_back("qpos");
      heuristics.push_back("grid");
    } else if (std::find(known.begin(), known.end(), h) != known.end()) {
      heuristics.push_back(h);
    } else {
      throw std::invalid_argument("unknown heuristic " + h);
    }
  }
  const auto suite = benchmark_suite();
  std::vector<const Benchmark*> chosen;
  if (options.circuits.empty()) {
    for (const auto& b : suite) {
      chosen.push_back(&b);
    }
  } else {
    for (const auto& name : options.circuits) {
      const auto it = std::find_if(suite.begin(), suite.end(),
                                   [&](const Benchmark& b) { return b.name == name; });
      if (it == suite.end()) {
        throw std::invalid_argument("unknown benchmark " + name);
      }
      chosen.push_back(&*it);
    }
  }
  std::vector<Job> jobs;
  for (const auto* b : chosen) {
    for (const auto& h : heuristics) {
      jobs.push_back({b, h});
    }
  }
  std::vector<BenchRow> rows(jobs.size());
  unsigned threads = options.threads == 0 ? std::max(1U, std::thread::hardware_concurrency())
                                          : options.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      rows[i] = run_job(jobs[i], options);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "circuit,qubits,gates,heuristic,status,latency_us,area\n";
  for (const auto& r : rows) {
    os << r.circuit << "," << r.qubits << "," << r.gates << "," << r.heuristic << ","
       << r.status << ",";
    if (r.status == "ok") {
      os << r.latency << "," << r.area;
    } else {
      os << ",";
    }
    os << "\n";
  }
  return os.str();
}

} // namespace qpnr
