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

#include "qpnr/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace qpnr {

namespace {

// Splits text into lines, dropping `#` comments and blank lines; each entry
// keeps its 1-based line number.
std::vector<std::pair<int, std::string>> content_lines(std::string_view text) {
  std::vector<std::pair<int, std::string>> out;
  int n = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++n;
    line = line.substr(0, line.find('#'));
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      out.emplace_back(n, line);
    }
  }
  return out;
}

template <typename T> T field(std::istringstream& in, int line, const char* what) {
  T value{};
  if (!(in >> value)) {
    throw FormatError(std::string("expected ") + what, line);
  }
  return value;
}

} // namespace

FormatError::FormatError(const std::string& what, int line)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string write_placement(const InstructionSequence& seq, const Layout& layout,
                            const std::vector<BlockId>& initial) {
  std::ostringstream os;
  for (std::size_t q = 0; q < initial.size(); ++q) {
    const Position p = layout.block(initial[q]).position;
    os << seq.qubit_name(static_cast<QubitIndex>(q)) << " " << p.col << "," << p.row
       << "\n";
  }
  return os.str();
}

std::vector<BlockId> read_placement(std::string_view text, const InstructionSequence& seq,
                                    const Layout& layout) {
  std::vector<BlockId> out(seq.num_qubits(), -1);
  std::set<BlockId> used;
  for (const auto& [n, line] : content_lines(text)) {
    std::istringstream in(line);
    const auto name = field<std::string>(in, n, "qubit name");
    const auto where = field<std::string>(in, n, "col,row");
    const auto q = seq.find_qubit(name);
    if (!q) {
      throw FormatError("unknown qubit " + name, n);
    }
    const auto comma = where.find(',');
    Position p;
    try {
      if (comma == std::string::npos) {
        throw std::invalid_argument("comma");
      }
      p = {std::stoi(where.substr(0, comma)), std::stoi(where.substr(comma + 1))};
    } catch (const std::exception&) {
      throw FormatError("bad position " + where, n);
    }
    const auto b = layout.at(p);
    if (!b) {
      throw FormatError("no block at " + where, n);
    }
    if (out[static_cast<std::size_t>(*q)] != -1) {
      throw FormatError("qubit " + name + " placed twice", n);
    }
    if (!used.insert(*b).second) {
      throw FormatError("block " + where + " holds two qubits", n);
    }
    out[static_cast<std::size_t>(*q)] = *b;
  }
  for (std::size_t q = 0; q < out.size(); ++q) {
    if (out[q] == -1) {
      throw FormatError("qubit " + seq.qubit_name(static_cast<QubitIndex>(q)) +
                            " has no placement",
                        0);
    }
  }
  return out;
}

std::string write_assignment(const GateAssignment& assignment) {
  std::ostringstream os;
  for (const auto& [id, name] : assignment) {
    os << id << " " << name << "\n";
  }
  return os.str();
}

GateAssignment read_assignment(std::string_view text) {
  GateAssignment out;
  for (const auto& [n, line] : content_lines(text)) {
    std::istringstream in(line);
    const auto id = field<InstrId>(in, n, "instruction id");
    const auto name = field<std::string>(in, n, "location name");
    if (!out.emplace(id, name).second) {
      throw FormatError("instruction " + std::to_string(id) + " assigned twice", n);
    }
  }
  return out;
}

std::string write_schedule(const Schedule& s) {
  std::ostringstream os;
  os << "latency " << s.total_latency << "\ninitial";
  for (BlockId b : s.initial) {
    os << " " << b;
  }
  os << "\nfinal";
  for (BlockId b : s.final_positions) {
    os << " " << b;
  }
  os << "\n";
  for (const auto& h : s.hops) {
    os << "hop " << h.start << " " << h.end << " " << h.qubit << " " << h.from << " "
       << h.to << " " << h.route << "\n";
  }
  for (const auto& g : s.gates) {
    os << "gate " << g.instruction << " " << g.block << " " << g.start << " " << g.end;
    for (QubitIndex q : g.qubits) {
      os << " " << q;
    }
    os << "\n";
  }
  for (const auto& st : s.stalls) {
    os << "stall " << st.instruction << " " << st.ready << " " << st.start << " "
       << st.wait << " " << (st.resource.empty() ? "-" : st.resource) << "\n";
  }
  return os.str();
}

Schedule read_schedule(std::string_view text) {
  Schedule s;
  for (const auto& [n, line] : content_lines(text)) {
    std::istringstream in(line);
    const auto kind = field<std::string>(in, n, "record kind");
    if (kind == "latency") {
      s.total_latency = field<Time>(in, n, "latency");
    } else if (kind == "initial" || kind == "final") {
      auto& list = kind == "initial" ? s.initial : s.final_positions;
      for (BlockId b; in >> b;) {
        list.push_back(b);
      }
    } else if (kind == "hop") {
      HopEvent h;
      h.start = field<Time>(in, n, "start");
      h.end = field<Time>(in, n, "end");
      h.qubit = field<QubitIndex>(in, n, "qubit");
      h.from = field<BlockId>(in, n, "from");
      h.to = field<BlockId>(in, n, "to");
      h.route = field<int>(in, n, "route");
      s.hops.push_back(h);
    } else if (kind == "gate") {
      GateEvent g;
      g.instruction = field<InstrId>(in, n, "instruction");
      g.block = field<BlockId>(in, n, "block");
      g.start = field<Time>(in, n, "start");
      g.end = field<Time>(in, n, "end");
      for (QubitIndex q; in >> q;) {
        g.qubits.push_back(q);
      }
      s.gates.push_back(std::move(g));
    } else if (kind == "stall") {
      StallRecord st;
      st.instruction = field<InstrId>(in, n, "instruction");
      st.ready = field<Time>(in, n, "ready");
      st.start = field<Time>(in, n, "start");
      st.wait = field<Time>(in, n, "wait");
      std::string rest;
      std::getline(in >> std::ws, rest);
      while (!rest.empty() && (rest.back() == '\r' || rest.back() == ' ')) {
        rest.pop_back();
      }
      st.resource = rest == "-" ? "" : rest;
      s.stalls.push_back(std::move(st));
    } else {
      throw FormatError("unknown record " + kind, n);
    }
    if (kind != "initial" && kind != "final" && kind != "stall" && kind != "gate") {
      std::string extra;
      if (in >> extra) {
        throw FormatError("trailing field " + extra, n);
      }
    }
  }
  return s;
}

std::string schedule_summary_json(const Schedule& schedule, const InstructionSequence& seq,
                                  const Layout& layout) {
  nlohmann::ordered_json j;
  j["latency_us"] = schedule.total_latency;
  j["area"] = layout.empty() ? 0 : area(layout);
  j["blocks"] = layout.size();
  j["gate_locations"] = layout.gate_blocks().size();
  j["instructions"] = seq.size();
  j["qubits"] = seq.num_qubits();
  j["hops"] = schedule.hops.size();
  auto stalls = schedule.stalls;
  std::stable_sort(stalls.begin(), stalls.end(),
                   [](const StallRecord& a, const StallRecord& b) { return a.wait > b.wait; });
  auto& report = j["stalls"] = nlohmann::ordered_json::array();
  for (const auto& st : stalls) {
    report.push_back({{"instruction", st.instruction},
                      {"ready", st.ready},
                      {"start", st.start},
                      {"wait", st.wait},
                      {"resource", st.resource}});
  }
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read " + path);
  }
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_file(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size()))) {
    throw std::runtime_error("cannot write " + path);
  }
}

} // namespace qpnr
