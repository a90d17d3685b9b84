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

#include "qpnr/dataflow.hpp"
#include "qpnr/greedy.hpp"
#include "qpnr/grid.hpp"
#include "qpnr/scheduler.hpp"
#include "qpnr/tech.hpp"

#include <stdexcept>
#include <string>
#include <string_view>

namespace qpnr {

/// Technology timing and every heuristic knob. The scheduler options are
/// shared by all three heuristics.
struct Config {
  TechnologyParams tech;
  SchedulerOptions scheduler;
  GridOptions grid;
  GreedyOptions greedy;
  DataflowOptions dataflow;

  /// Copies of `scheduler` as each heuristic expects them.
  [[nodiscard]] GridOptions grid_options() const;
  [[nodiscard]] GreedyOptions greedy_options() const;
  [[nodiscard]] DataflowOptions dataflow_options() const;
};

class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string& message, int line);
  [[nodiscard]] int line() const { return line_; }

private:
  int line_;
};

/// `key = value` lines; `#` starts a comment. Keys not mentioned keep
/// their value from `base`. Throws ConfigError on an unknown key, a
/// malformed value or technology parameters that fail validation.
[[nodiscard]] Config parse_config(std::string_view text, const Config& base = {});
/// Throws std::runtime_error if the file cannot be read.
[[nodiscard]] Config load_config(const std::string& path, const Config& base = {});
/// Every key, one per line, in a fixed order; parse_config reads it back.
[[nodiscard]] std::string write_config(const Config& config);

} // namespace qpnr
