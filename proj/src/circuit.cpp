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

#include "qpnr/circuit.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <queue>
#include <sstream>
#include <tuple>

namespace qpnr {

namespace {

struct GateInfo {
  GateKind kind;
  std::string_view name;
  int arity;
};

constexpr std::array<GateInfo, 9> kGates{{
    {GateKind::H, "H", 1},
    {GateKind::X, "X", 1},
    {GateKind::Z, "Z", 1},
    {GateKind::S, "S", 1},
    {GateKind::T, "T", 1},
    {GateKind::Measure, "MEASURE", 1},
    {GateKind::Prep, "PREP", 1},
    {GateKind::CX, "CX", 2},
    {GateKind::CZ, "CZ", 2},
}};

const GateInfo& info(GateKind gate) {
  return kGates.at(static_cast<std::size_t>(gate));
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_identifier(std::string_view s) {
  if (s.empty() ||
      !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) {
    return false;
  }
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

} // namespace

int arity(GateKind gate) { return info(gate).arity; }

std::string_view gate_name(GateKind gate) { return info(gate).name; }

std::optional<GateKind> parse_gate_name(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](char c) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  });
  if (upper == "CNOT") {
    return GateKind::CX;
  }
  for (const auto& g : kGates) {
    if (g.name == upper) {
      return g.kind;
    }
  }
  return std::nullopt;
}

Time gate_latency(GateKind gate, const TechnologyParams& tech) {
  switch (gate) {
  case GateKind::Measure:
    return tech.t_measure;
  case GateKind::CX:
  case GateKind::CZ:
    return tech.t_two_qubit_gate;
  default:
    return tech.t_one_qubit_gate;
  }
}

InstrId InstructionSequence::add(GateKind gate,
                                 const std::vector<std::string>& operands,
                                 std::optional<char> label) {
  if (static_cast<int>(operands.size()) != arity(gate)) {
    throw std::invalid_argument(std::string(gate_name(gate)) + " expects " +
                                std::to_string(arity(gate)) + " operand(s), got " +
                                std::to_string(operands.size()));
  }
  if (operands.size() == 2 && operands[0] == operands[1]) {
    throw std::invalid_argument("duplicate operand " + operands[0]);
  }
  Instruction instr;
  instr.id = static_cast<InstrId>(instructions_.size());
  instr.gate = gate;
  instr.label = label;
  for (const auto& name : operands) {
    auto [it, inserted] =
        qubit_index_.try_emplace(name, static_cast<QubitIndex>(qubits_.size()));
    if (inserted) {
      qubits_.push_back(name);
    }
    instr.operands.push_back(it->second);
  }
  instructions_.push_back(std::move(instr));
  return instructions_.back().id;
}

std::optional<QubitIndex>
InstructionSequence::find_qubit(std::string_view name) const {
  auto it = qubit_index_.find(std::string(name));
  if (it == qubit_index_.end()) {
    return std::nullopt;
  }
  return it->second;
}

InstructionSequence parse_qasm(std::string_view text) {
  InstructionSequence seq;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }

    std::optional<char> label;
    if (const auto colon = line.find(':'); colon != std::string_view::npos) {
      const auto tag = trim(line.substr(0, colon));
      if (tag.size() != 1 || !std::isalpha(static_cast<unsigned char>(tag[0]))) {
        throw ParseError(line_no, "label must be a single letter");
      }
      label = tag[0];
      line = trim(line.substr(colon + 1));
    }

    const auto space = line.find_first_of(" \t");
    const auto gate_token = line.substr(0, space);
    const auto gate = parse_gate_name(gate_token);
    if (!gate) {
      throw ParseError(line_no, "unknown gate '" + std::string(gate_token) + "'");
    }

    std::vector<std::string> operands;
    if (space != std::string_view::npos) {
      std::string_view rest = line.substr(space);
      while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto tok = trim(rest.substr(0, comma));
        if (!is_identifier(tok)) {
          throw ParseError(line_no, "bad qubit name '" + std::string(tok) + "'");
        }
        operands.emplace_back(tok);
        if (comma == std::string_view::npos) {
          break;
        }
        rest = rest.substr(comma + 1);
      }
    }
    try {
      seq.add(*gate, operands, label);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return seq;
}

InstructionSequence load_qasm(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_qasm(buffer.str());
}

std::string to_qasm(const InstructionSequence& seq) {
  std::ostringstream out;
  for (const auto& instr : seq.instructions()) {
    if (instr.label) {
      out << *instr.label << ": ";
    }
    out << gate_name(instr.gate) << ' ';
    for (std::size_t i = 0; i < instr.operands.size(); ++i) {
      out << (i ? "," : "") << seq.qubit_name(instr.operands[i]);
    }
    out << '\n';
  }
  return out.str();
}

DataflowGraph::DataflowGraph(std::size_t num_instructions,
                             std::size_t num_qubits,
                             std::vector<DataflowArc> arcs)
    : num_instr_(num_instructions), num_qubits_(num_qubits),
      arcs_(std::move(arcs)), out_(num_nodes()), in_(num_nodes()),
      chains_(num_qubits) {
  for (std::size_t i = 0; i < arcs_.size(); ++i) {
    const auto& a = arcs_[i];
    out_.at(static_cast<std::size_t>(a.from)).push_back(static_cast<int>(i));
    in_.at(static_cast<std::size_t>(a.to)).push_back(static_cast<int>(i));
  }
  // Chains follow the qubit from its input node.
  for (std::size_t q = 0; q < num_qubits_; ++q) {
    int node = input_node(static_cast<QubitIndex>(q));
    bool advanced = true;
    while (advanced) {
      advanced = false;
      for (int arc : out_[static_cast<std::size_t>(node)]) {
        if (arcs_[static_cast<std::size_t>(arc)].qubit == static_cast<QubitIndex>(q)) {
          chains_[q].push_back(arc);
          node = arcs_[static_cast<std::size_t>(arc)].to;
          advanced = true;
          break;
        }
      }
    }
  }
}

std::vector<int> DataflowGraph::topological_order() const {
  std::vector<int> indegree(num_nodes(), 0);
  for (const auto& a : arcs_) {
    ++indegree[static_cast<std::size_t>(a.to)];
  }
  // Min-heap keeps the order deterministic: inputs (largest ids) are sources
  // and instructions come out in id order whenever dependencies allow.
  auto key = [this](int node) {
    return is_input(node) ? node - static_cast<int>(num_nodes()) : node;
  };
  auto cmp = [&](int a, int b) { return key(a) > key(b); };
  std::priority_queue<int, std::vector<int>, decltype(cmp)> ready(cmp);
  for (std::size_t n = 0; n < num_nodes(); ++n) {
    if (indegree[n] == 0) {
      ready.push(static_cast<int>(n));
    }
  }
  std::vector<int> order;
  order.reserve(num_nodes());
  while (!ready.empty()) {
    const int n = ready.top();
    ready.pop();
    order.push_back(n);
    for (int arc : out_[static_cast<std::size_t>(n)]) {
      const int to = arcs_[static_cast<std::size_t>(arc)].to;
      if (--indegree[static_cast<std::size_t>(to)] == 0) {
        ready.push(to);
      }
    }
  }
  return order;
}

bool DataflowGraph::is_acyclic() const {
  return topological_order().size() == num_nodes();
}

DataflowGraph build_dataflow(const InstructionSequence& seq) {
  const auto n = seq.size();
  std::vector<int> last(seq.num_qubits());
  for (std::size_t q = 0; q < seq.num_qubits(); ++q) {
    last[q] = static_cast<int>(n + q);
  }
  std::vector<DataflowArc> arcs;
  for (const auto& instr : seq.instructions()) {
    for (QubitIndex q : instr.operands) {
      arcs.push_back({last[static_cast<std::size_t>(q)], instr.id, q});
      last[static_cast<std::size_t>(q)] = instr.id;
    }
  }
  return DataflowGraph(n, seq.num_qubits(), std::move(arcs));
}

std::string dump_dataflow(const DataflowGraph& graph,
                          const InstructionSequence& seq) {
  auto node_name = [&](int node) {
    if (graph.is_input(node)) {
      return "in(" +
             seq.qubit_name(node - static_cast<int>(graph.num_instructions())) +
             ")";
    }
    return std::to_string(node);
  };
  auto arcs = graph.arcs();
  std::sort(arcs.begin(), arcs.end(), [&](const auto& a, const auto& b) {
    // Inputs sort before instructions.
    auto rank = [&](int node) {
      return graph.is_input(node) ? node - static_cast<int>(graph.num_nodes())
                                  : node;
    };
    return std::tuple(rank(a.from), rank(a.to), a.qubit) <
           std::tuple(rank(b.from), rank(b.to), b.qubit);
  });
  std::ostringstream out;
  for (const auto& a : arcs) {
    out << node_name(a.from) << " -> " << node_name(a.to) << ' '
        << seq.qubit_name(a.qubit) << '\n';
  }
  return out.str();
}

} // namespace qpnr
