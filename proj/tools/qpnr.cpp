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

// qpnr: lay out, schedule and synthesise control for ion-trap circuits.
//
// Exit codes: 0 success, 1 usage, 2 bad input, 3 deadlock or no route.

#include "qpnr/bench.hpp"
#include "qpnr/benchmarks.hpp"
#include "qpnr/config.hpp"
#include "qpnr/control.hpp"
#include "qpnr/dataflow.hpp"
#include "qpnr/greedy.hpp"
#include "qpnr/grid.hpp"
#include "qpnr/io.hpp"
#include "qpnr/netlist.hpp"
#include "qpnr/render.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

namespace {

using namespace qpnr;

constexpr int kUsage = 1;
constexpr int kInput = 2;
constexpr int kFailure = 3;

/// A heuristic or the scheduler could not produce a schedule.
class Failure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A file could not be read or written.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  try {
    return read_file(path);
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
}

void spill(const std::string& path, std::string_view text) {
  try {
    write_file(path, text);
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
}

Config load(const std::string& path) {
  return path.empty() ? Config{} : parse_config(slurp(path));
}

std::string describe(const DeadlockReport& r) {
  return "deadlock at t=" + std::to_string(r.time) + " us, instruction " +
         std::to_string(r.blocked_instruction) + " blocked: " + r.reason;
}

Schedule require(const ScheduleResult& result) {
  if (const auto* d = std::get_if<DeadlockReport>(&result)) {
    throw Failure(describe(*d));
  }
  return std::get<Schedule>(result);
}

struct Outputs {
  std::string prefix;

  void write(const InstructionSequence& seq, const Layout& layout,
             const std::vector<BlockId>& initial, const Schedule& schedule,
             const GateAssignment* assignment) const {
    spill(prefix + ".layout.txt", write_layout(layout));
    spill(prefix + ".place.txt", write_placement(seq, layout, initial));
    spill(prefix + ".schedule.txt", write_schedule(schedule));
    if (assignment != nullptr) {
      spill(prefix + ".assign.txt", write_assignment(*assignment));
    }
    std::cout << schedule_summary_json(schedule, seq, layout);
  }
};

std::vector<std::pair<int, int>> parse_sizes(const std::string& text) {
  return parse_config("grid_cell_sizes = " + text).grid.cell_sizes;
}

int run(int argc, char** argv) {
  CLI::App app{"Ion-trap circuit layout, scheduling and control synthesis"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "key = value configuration file")
      ->check(CLI::ExistingFile);

  std::string circuit;
  std::string prefix = "out";

  auto* grid = app.add_subcommand("grid", "Best tiled cell layout");
  std::string cells;
  std::optional<int> placements;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::size_t> sample;
  grid->add_option("circuit", circuit, "QASM circuit")->required();
  grid->add_option("--cells", cells, "cell sizes, e.g. 2x2,3x2");
  grid->add_option("--placements", placements, "random placements per cell");
  grid->add_option("--seed", seed, "placement seed");
  grid->add_option("--threads", threads, "worker threads");
  grid->add_option("--sample", sample, "cells evaluated per size, 0 for all");
  grid->add_option("-o,--output", prefix, "output file prefix");

  auto* greedy = app.add_subcommand("greedy", "Greedy place and route");
  greedy->add_option("circuit", circuit, "QASM circuit")->required();
  greedy->add_option("-o,--output", prefix, "output file prefix");

  auto* dataflow = app.add_subcommand("dataflow", "Dataflow node-group layout");
  bool fold = false;
  std::optional<int> global_channels;
  dataflow->add_option("circuit", circuit, "QASM circuit")->required();
  dataflow->add_flag("--fold", fold, "fold short columns");
  dataflow->add_option("--global-channels", global_channels, "channels per gap")
      ->check(CLI::IsMember({1, 2}));
  dataflow->add_option("-o,--output", prefix, "output file prefix");

  auto* sched = app.add_subcommand("schedule", "Schedule a circuit on a given layout");
  std::string layout_path;
  std::string place_path;
  std::string assign_path;
  sched->add_option("circuit", circuit, "QASM circuit")->required();
  sched->add_option("--layout", layout_path, "layout file")->required();
  sched->add_option("--place", place_path, "initial placement file")->required();
  sched->add_option("--assign", assign_path, "gate assignment file");
  sched->add_option("-o,--output", prefix, "output file prefix");

  auto* synth = app.add_subcommand("synth-control", "Control messages and HDL netlist");
  std::string schedule_path;
  std::string out_dir = "control";
  synth->add_option("layout", layout_path, "layout file")->required();
  synth->add_option("schedule", schedule_path, "schedule file")->required();
  synth->add_option("--circuit", circuit, "QASM circuit the schedule runs")->required();
  synth->add_option("-d,--dir", out_dir, "output directory");

  auto* bench = app.add_subcommand("bench", "All bundled circuits x heuristics as CSV");
  std::vector<std::string> heuristics;
  std::vector<std::string> circuits;
  std::string csv_path;
  bench->add_option("--heuristics", heuristics, "grid,qpos,greedy,dataflow,...")
      ->delimiter(',');
  bench->add_option("--circuits", circuits, "benchmark names")->delimiter(',');
  bench->add_option("--seed", seed, "placement seed");
  bench->add_option("--threads", threads, "worker threads, 0 for one per core");
  bench->add_option("-o,--output", csv_path, "CSV file (default stdout)");
  std::string export_dir;
  bench->add_option("--export-circuits", export_dir,
                    "write the bundled circuits as QASM into this directory and exit");

  auto* render = app.add_subcommand("render", "Draw a layout");
  std::string svg_path;
  render->add_option("layout", layout_path, "layout file")->required();
  render->add_option("--place", place_path, "mark a placement (needs --circuit)");
  render->add_option("--circuit", circuit, "QASM circuit naming the qubits");
  render->add_option("--svg", svg_path, "also write an SVG drawing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kUsage;
  }

  const Config config = load(config_path);
  const auto& tech = config.tech;

  if (grid->parsed()) {
    const auto seq = parse_qasm(slurp(circuit));
    auto options = config.grid_options();
    if (!cells.empty()) {
      options.cell_sizes = parse_sizes(cells);
    }
    options.random_placements = placements.value_or(options.random_placements);
    options.seed = seed.value_or(options.seed);
    options.threads = threads.value_or(options.threads);
    options.sample = sample.value_or(options.sample);
    GridSearchResult best;
    try {
      best = grid_search(seq, tech, options);
    } catch (const std::runtime_error& e) {
      throw Failure(e.what());
    }
    const auto df = build_dataflow(seq);
    const auto schedule = require(qpnr::schedule(
        seq, best.best_layout, best.best_placement,
        critical_path_priorities(df, seq, tech), std::nullopt, tech, options.scheduler));
    std::string cells_csv = "cell,min_latency_us,mean_latency_us,max_latency_us,deadlocks\n";
    for (const auto& c : best.per_cell) {
      if (!c.feasible()) {
        cells_csv += "\"" + c.encoding + "\",,,," + std::to_string(c.deadlocks) + "\n";
        continue;
      }
      char mean[32];
      std::snprintf(mean, sizeof mean, "%.2f", c.mean_latency);
      cells_csv += "\"" + c.encoding + "\"," + std::to_string(c.min_latency) + "," + mean + "," +
                   std::to_string(c.max_latency) + "," + std::to_string(c.deadlocks) + "\n";
    }
    spill(prefix + ".cells.csv", cells_csv);
    std::cerr << "best cell " << best.best_cell.encoding() << "\n";
    Outputs{prefix}.write(seq, best.best_layout, best.best_placement, schedule, nullptr);
  } else if (greedy->parsed()) {
    const auto seq = parse_qasm(slurp(circuit));
    try {
      const auto r = greedy_layout(seq, tech, config.greedy_options());
      Outputs{prefix}.write(seq, r.layout, r.initial, r.schedule, nullptr);
    } catch (const GreedyError& e) {
      throw Failure(std::string(e.what()) + "; last " + describe(e.last_deadlock));
    }
  } else if (dataflow->parsed()) {
    const auto seq = parse_qasm(slurp(circuit));
    auto options = config.dataflow_options();
    options.fold = options.fold || fold;
    options.global_channels = global_channels.value_or(options.global_channels);
    const auto df = build_dataflow(seq);
    try {
      const auto r = dataflow_layout(seq, df, tech, options);
      std::cerr << "merges " << r.merges << ", iterates " << r.history.size() << "\n";
      Outputs{prefix}.write(seq, r.layout, r.initial, r.schedule, &r.assignment);
    } catch (const DataflowError& e) {
      throw Failure(e.what());
    }
  } else if (sched->parsed()) {
    const auto seq = parse_qasm(slurp(circuit));
    const auto layout = read_layout(slurp(layout_path));
    const auto initial = read_placement(slurp(place_path), seq, layout);
    const auto df = build_dataflow(seq);
    std::optional<GateAssignment> assignment;
    PriorityMap priorities;
    if (!assign_path.empty()) {
      assignment = read_assignment(slurp(assign_path));
      priorities = movement_aware_priorities(df, seq, layout, *assignment, tech);
    } else {
      priorities = critical_path_priorities(df, seq, tech);
    }
    const auto schedule = require(
        qpnr::schedule(seq, layout, initial, priorities, assignment, tech, config.scheduler));
    spill(prefix + ".schedule.txt", write_schedule(schedule));
    std::cout << schedule_summary_json(schedule, seq, layout);
  } else if (synth->parsed()) {
    const auto seq = parse_qasm(slurp(circuit));
    const auto layout = read_layout(slurp(layout_path));
    const auto schedule = read_schedule(slurp(schedule_path));
    const auto errors = validate_schedule(schedule, seq, layout, tech);
    if (!errors.empty()) {
      throw std::invalid_argument("schedule does not fit the layout: " + errors.front());
    }
    const auto graph = derive_movement_graph(layout, tech);
    const auto messages =
        order_messages(messages_from_schedule(schedule, seq, graph), schedule);
    const auto rom = control_rom(messages, schedule.initial);
    const auto netlist = emit_netlist(layout, rom.size());
    const auto lint = lint_netlist(netlist);
    for (const auto& v : lint) {
      std::cerr << "lint: " << v << "\n";
    }
    std::filesystem::create_directories(out_dir);
    const std::string dir = out_dir + "/";
    spill(dir + "control_top.v", netlist_text(netlist));
    spill(dir + "control_rom.v", control_rom_text(rom));
    for (const auto& t : hdl_templates()) {
      spill(dir + std::string(t.file), t.text);
    }
    std::string bin;
    std::string txt;
    for (const auto& m : messages) {
      const auto bytes = encode(m);
      bin.append(bytes.begin(), bytes.end());
      txt += "Q" + std::to_string(m.qubit) + " dest " +
             std::to_string(schedule.initial.at(m.qubit)) + ":";
      for (const auto& c : m.commands) {
        static constexpr const char* kOps[] = {"N", "E", "S", "W", "G", "wait", "end"};
        txt += " ";
        txt += kOps[static_cast<int>(c.op)];
        if (c.op == Opcode::Gate) {
          txt += ":" + std::string(gate_name(c.gate));
        }
      }
      txt += "\n";
    }
    spill(dir + "messages.bin", bin);
    spill(dir + "messages.txt", txt);
    std::cout << netlist.instances.size() << " controller instances, " << rom.size()
              << " ROM words, " << lint.size() << " lint findings\n";
    if (!lint.empty()) {
      return kFailure;
    }
  } else if (bench->parsed() && !export_dir.empty()) {
    std::filesystem::create_directories(export_dir);
    for (const auto& b : benchmark_suite()) {
      spill(export_dir + "/" + b.name + ".qasm", to_qasm(b.circuit));
    }
  } else if (bench->parsed()) {
    BenchOptions options;
    options.config = config;
    if (!heuristics.empty()) {
      options.heuristics = heuristics;
    }
    options.circuits = circuits;
    options.seed = seed.value_or(config.grid.seed);
    options.threads = threads.value_or(1);
    const auto csv = bench_csv(run_bench(options));
    if (csv_path.empty()) {
      std::cout << csv;
    } else {
      spill(csv_path, csv);
    }
  } else if (render->parsed()) {
    const auto layout = read_layout(slurp(layout_path));
    std::vector<BlockId> initial;
    if (!place_path.empty()) {
      if (circuit.empty()) {
        throw std::invalid_argument("--place needs --circuit");
      }
      initial = read_placement(slurp(place_path), parse_qasm(slurp(circuit)), layout);
    }
    std::cout << render_ascii(layout);
    if (!svg_path.empty()) {
      spill(svg_path, render_svg(layout, initial));
    }
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Failure& e) {
    std::cerr << "qpnr: " << e.what() << "\n";
    return kFailure;
  } catch (const InputError& e) {
    std::cerr << "qpnr: " << e.what() << "\n";
    return kInput;
  } catch (const ParseError& e) {
    std::cerr << "qpnr: " << e.what() << "\n";
    return kInput;
  } catch (const FormatError& e) {
    std::cerr << "qpnr: " << e.what() << "\n";
    return kInput;
  } catch (const ConfigError& e) {
    std::cerr << "qpnr: " << e.what() << "\n";
    return kInput;
  } catch (const LayoutError& e) {
    std::cerr << "qpnr: " << e.what() << "\n";
    return kInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "qpnr: " << e.what() << "\n";
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "qpnr: " << e.what() << "\n";
    return kFailure;
  }
}
