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

#include "qpnr/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace qpnr {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T> T number(std::string_view text, int line) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw ConfigError("bad number '" + std::string(text) + "'", line);
  }
  return value;
}

bool boolean(std::string_view text, int line) {
  if (text == "true" || text == "1") {
    return true;
  }
  if (text == "false" || text == "0") {
    return false;
  }
  throw ConfigError("bad boolean '" + std::string(text) + "'", line);
}

std::vector<std::pair<int, int>> sizes(std::string_view text, int line) {
  std::vector<std::pair<int, int>> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto item = trim(text.substr(0, comma));
    const auto x = item.find('x');
    if (x == std::string_view::npos) {
      throw ConfigError("cell size must look like WxH", line);
    }
    out.emplace_back(number<int>(item.substr(0, x), line),
                     number<int>(item.substr(x + 1), line));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
  }
  if (out.empty()) {
    throw ConfigError("at least one cell size is required", line);
  }
  return out;
}

using Setter = std::function<void(Config&, std::string_view, int)>;
using Getter = std::function<std::string(const Config&)>;

struct Key {
  const char* name;
  Setter set;
  Getter get;
};

template <typename T> std::string str(T v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      {"t_one_qubit_gate", [](Config& c, std::string_view v, int l) { c.tech.t_one_qubit_gate = number<Time>(v, l); },
       [](const Config& c) { return str(c.tech.t_one_qubit_gate); }},
      {"t_two_qubit_gate", [](Config& c, std::string_view v, int l) { c.tech.t_two_qubit_gate = number<Time>(v, l); },
       [](const Config& c) { return str(c.tech.t_two_qubit_gate); }},
      {"t_measure", [](Config& c, std::string_view v, int l) { c.tech.t_measure = number<Time>(v, l); },
       [](const Config& c) { return str(c.tech.t_measure); }},
      {"t_straight", [](Config& c, std::string_view v, int l) { c.tech.t_straight = number<Time>(v, l); },
       [](const Config& c) { return str(c.tech.t_straight); }},
      {"t_turn", [](Config& c, std::string_view v, int l) { c.tech.t_turn = number<Time>(v, l); },
       [](const Config& c) { return str(c.tech.t_turn); }},
      {"congestion_penalty", [](Config& c, std::string_view v, int l) { c.scheduler.congestion_penalty = number<Time>(v, l); },
       [](const Config& c) { return str(c.scheduler.congestion_penalty); }},
      {"max_idle_rounds", [](Config& c, std::string_view v, int l) { c.scheduler.max_idle_rounds = number<long>(v, l); },
       [](const Config& c) { return str(c.scheduler.max_idle_rounds); }},
      {"serial_fallback", [](Config& c, std::string_view v, int l) { c.scheduler.serial_fallback = boolean(v, l); },
       [](const Config& c) { return std::string(c.scheduler.serial_fallback ? "true" : "false"); }},
      {"grid_cell_sizes", [](Config& c, std::string_view v, int l) { c.grid.cell_sizes = sizes(v, l); },
       [](const Config& c) {
         std::string out;
         for (auto [w, h] : c.grid.cell_sizes) {
           out += (out.empty() ? "" : ",") + std::to_string(w) + "x" + std::to_string(h);
         }
         return out;
       }},
      {"grid_random_placements", [](Config& c, std::string_view v, int l) { c.grid.random_placements = number<int>(v, l); },
       [](const Config& c) { return str(c.grid.random_placements); }},
      {"grid_seed", [](Config& c, std::string_view v, int l) { c.grid.seed = number<std::uint64_t>(v, l); },
       [](const Config& c) { return str(c.grid.seed); }},
      {"grid_threads", [](Config& c, std::string_view v, int l) { c.grid.threads = number<unsigned>(v, l); },
       [](const Config& c) { return str(c.grid.threads); }},
      {"grid_sample", [](Config& c, std::string_view v, int l) { c.grid.sample = number<std::size_t>(v, l); },
       [](const Config& c) { return str(c.grid.sample); }},
      {"greedy_max_iterations", [](Config& c, std::string_view v, int l) { c.greedy.max_iterations = number<int>(v, l); },
       [](const Config& c) { return str(c.greedy.max_iterations); }},
      {"greedy_spacing", [](Config& c, std::string_view v, int l) { c.greedy.spacing = number<int>(v, l); },
       [](const Config& c) { return str(c.greedy.spacing); }},
      {"df_fold", [](Config& c, std::string_view v, int l) { c.dataflow.fold = boolean(v, l); },
       [](const Config& c) { return std::string(c.dataflow.fold ? "true" : "false"); }},
      {"df_global_channels", [](Config& c, std::string_view v, int l) { c.dataflow.global_channels = number<int>(v, l); },
       [](const Config& c) { return str(c.dataflow.global_channels); }},
      {"df_max_merges", [](Config& c, std::string_view v, int l) { c.dataflow.max_merges = number<int>(v, l); },
       [](const Config& c) { return str(c.dataflow.max_merges); }},
      {"df_congestion_factor", [](Config& c, std::string_view v, int l) { c.dataflow.congestion_factor = number<double>(v, l); },
       [](const Config& c) { return str(c.dataflow.congestion_factor); }},
      {"df_max_storage", [](Config& c, std::string_view v, int l) { c.dataflow.max_storage_per_group = number<int>(v, l); },
       [](const Config& c) { return str(c.dataflow.max_storage_per_group); }},
      {"df_backup", [](Config& c, std::string_view v, int l) { c.dataflow.backup = number<int>(v, l); },
       [](const Config& c) { return str(c.dataflow.backup); }},
      {"df_patience", [](Config& c, std::string_view v, int l) { c.dataflow.patience = number<int>(v, l); },
       [](const Config& c) { return str(c.dataflow.patience); }},
  };
  return table;
}

} // namespace

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error("config line " + std::to_string(line) + ": " + message),
      line_(line) {}

GridOptions Config::grid_options() const {
  GridOptions o = grid;
  o.scheduler = scheduler;
  return o;
}

GreedyOptions Config::greedy_options() const {
  GreedyOptions o = greedy;
  o.scheduler = scheduler;
  return o;
}

DataflowOptions Config::dataflow_options() const {
  DataflowOptions o = dataflow;
  o.scheduler = scheduler;
  return o;
}

Config parse_config(std::string_view text, const Config& base) {
  Config config = base;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected key = value", line_no);
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Key& k) { return key == k.name; });
    if (it == table.end()) {
      throw ConfigError("unknown key '" + std::string(key) + "'", line_no);
    }
    it->set(config, value, line_no);
  }
  try {
    config.tech.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), line_no);
  }
  if (config.dataflow.global_channels != 1 && config.dataflow.global_channels != 2) {
    throw ConfigError("df_global_channels must be 1 or 2", line_no);
  }
  return config;
}

Config load_config(const std::string& path, const Config& base) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot read config " + path);
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), base);
}

std::string write_config(const Config& config) {
  std::string out;
  for (const auto& k : keys()) {
    out += std::string(k.name) + " = " + k.get(config) + "\n";
  }
  return out;
}

} // namespace qpnr
