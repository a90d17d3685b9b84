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

#include "generators.hpp"
#include "qpnr/bench.hpp"
#include "qpnr/benchmarks.hpp"
#include "qpnr/config.hpp"
#include "qpnr/dataflow.hpp"
#include "qpnr/grid.hpp"
#include "qpnr/io.hpp"
#include "qpnr/render.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <filesystem>

namespace qpnr {
namespace {

TEST_CASE("config") {
  SECTION("defaults round-trip") {
    const Config defaults;
    const auto text = write_config(defaults);
    CHECK(write_config(parse_config(text)) == text);
  }
  SECTION("values are read") {
    const auto c = parse_config(
        "# comment\nt_turn = 7\ngrid_cell_sizes = 2x2,3x2\ndf_fold = true\n"
        "df_congestion_factor = 1.5\nserial_fallback = false\n");
    CHECK(c.tech.t_turn == 7);
    CHECK(c.grid.cell_sizes == std::vector<std::pair<int, int>>{{2, 2}, {3, 2}});
    CHECK(c.dataflow.fold);
    CHECK(c.dataflow.congestion_factor == 1.5);
    CHECK_FALSE(c.scheduler.serial_fallback);
    CHECK_FALSE(c.dataflow_options().scheduler.serial_fallback);
    CHECK_FALSE(c.grid_options().scheduler.serial_fallback);
    CHECK_FALSE(c.greedy_options().scheduler.serial_fallback);
    CHECK(write_config(parse_config(write_config(c))) == write_config(c));
  }
  SECTION("base values survive") {
    Config base;
    base.tech.t_measure = 99;
    CHECK(parse_config("t_turn = 4", base).tech.t_measure == 99);
  }
  SECTION("errors carry the line") {
    const auto line_of = [](const char* text) {
      try {
        (void)parse_config(text);
      } catch (const ConfigError& e) {
        return e.line();
      }
      return 0;
    };
    CHECK(line_of("t_turn = 3\nbogus = 1\n") == 2);
    CHECK(line_of("t_turn = x\n") == 1);
    CHECK(line_of("\n\nt_turn = 1\n") == 3);
    CHECK(line_of("df_global_channels = 3\n") == 1);
    CHECK(line_of("no equals sign\n") == 1);
  }
  SECTION("bundled default file matches the built-in defaults") {
    const auto path = std::filesystem::path(QPNR_SOURCE_DIR) / "config" / "default.cfg";
    CHECK(write_config(load_config(path.string())) == write_config(Config{}));
  }
}

TEST_CASE("artifact round-trips") {
  const TechnologyParams tech;
  const auto seq = example_circuit();
  const auto df = build_dataflow(seq);
  const auto r = dataflow_layout(seq, df, tech);

  CHECK(read_placement(write_placement(seq, r.layout, r.initial), seq, r.layout) == r.initial);
  CHECK(read_assignment(write_assignment(r.assignment)) == r.assignment);
  CHECK(read_schedule(write_schedule(r.schedule)) == r.schedule);
  CHECK(write_layout(read_layout(write_layout(r.layout))) == write_layout(r.layout));

  const auto summary = nlohmann::json::parse(schedule_summary_json(r.schedule, seq, r.layout));
  CHECK(summary.at("latency_us") == r.schedule.total_latency);
  CHECK(summary.at("area") == area(r.layout));
  CHECK(summary.at("stalls").size() == seq.size());

  SECTION("malformed input") {
    CHECK_THROWS_AS(read_placement("Q0 1,1\nQ0 1,1\n", seq, r.layout), FormatError);
    CHECK_THROWS_AS(read_placement("Q9 0,0\n", seq, r.layout), FormatError);
    CHECK_THROWS_AS(read_assignment("x NG1\n"), FormatError);
    try {
      (void)read_schedule("latency 4\nhop 1 2\n");
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(e.line() == 2);
    }
  }
}

TEST_CASE("schedule text round-trips on random runs") {
  std::mt19937_64 rng(14);
  const auto cell = qpos_cell();
  for (int trial = 0; trial < 20; ++trial) {
    const auto seq = test::random_circuit(rng, 2 + trial % 4, 3 + trial % 15);
    const auto tiling = tiling_for(seq.num_qubits());
    const auto layout = tile(cell, tiling.nx, tiling.ny);
    const auto initial = systematic_placement(cell, tiling, layout, seq.num_qubits());
    const auto result = schedule(seq, layout, initial,
                                 critical_path_priorities(build_dataflow(seq), seq, {}),
                                 std::nullopt, {});
    REQUIRE(std::holds_alternative<Schedule>(result));
    const auto& s = std::get<Schedule>(result);
    CHECK(read_schedule(write_schedule(s)) == s);
    CHECK(read_placement(write_placement(seq, layout, initial), seq, layout) == initial);
  }
}

TEST_CASE("render") {
  const auto cell = qpos_cell();
  const auto layout = tile(cell, 2, 2);
  const auto art = render_ascii(layout);
  const auto box = bounding_box(layout);
  CHECK(std::count(art.begin(), art.end(), '\n') == 3 * box.height());
  CHECK(std::count(art.begin(), art.end(), 'G') ==
        static_cast<long>(layout.gate_blocks().size()));
  const auto svg = render_svg(layout, {layout.gate_blocks()[0]});
  CHECK(svg.starts_with("<svg"));
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("bench") {
  BenchOptions options;
  options.circuits = {"l1_encode"};
  options.heuristics = {"qpos", "greedy", "dataflow"};
  const auto rows = run_bench(options);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.status == "ok");
    CHECK(row.qubits == 7);
    CHECK(row.gates == 21);
    CHECK(row.latency > 0);
  }
  const auto csv = bench_csv(rows);
  CHECK(csv.starts_with("circuit,qubits,gates,heuristic,status,latency_us,area\n"));
  options.threads = 3;
  CHECK(bench_csv(run_bench(options)) == csv);
  options.heuristics = {"simulated-annealing"};
  CHECK_THROWS_AS(run_bench(options), std::invalid_argument);
  options.heuristics = {"greedy"};
  options.circuits = {"shor"};
  CHECK_THROWS_AS(run_bench(options), std::invalid_argument);
}

} // namespace
} // namespace qpnr
