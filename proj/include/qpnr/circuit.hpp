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

#include "qpnr/tech.hpp"

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qpnr {

enum class GateKind : std::uint8_t { H, X, Z, S, T, Measure, Prep, CX, CZ };

[[nodiscard]] int arity(GateKind gate);
[[nodiscard]] std::string_view gate_name(GateKind gate);
[[nodiscard]] std::optional<GateKind> parse_gate_name(std::string_view name);
[[nodiscard]] Time gate_latency(GateKind gate, const TechnologyParams& tech);

using InstrId = int;
using QubitIndex = int;

struct Instruction {
  InstrId id = 0;
  GateKind gate = GateKind::H;
  /// Indices into InstructionSequence::qubits().
  std::vector<QubitIndex> operands;
  std::optional<char> label;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

class ParseError : public std::runtime_error {
public:
  ParseError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message),
        line_(line) {}
  [[nodiscard]] std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

/// Ordered instruction list. Qubits are numbered in order of first use.
class InstructionSequence {
public:
  InstructionSequence() = default;

  /// Appends an instruction on named qubits, registering new names.
  /// Throws std::invalid_argument on arity mismatch or repeated operands.
  InstrId add(GateKind gate, const std::vector<std::string>& operands,
              std::optional<char> label = std::nullopt);

  [[nodiscard]] const std::vector<Instruction>& instructions() const {
    return instructions_;
  }
  [[nodiscard]] const Instruction& operator[](InstrId id) const {
    return instructions_.at(static_cast<std::size_t>(id));
  }
  [[nodiscard]] std::size_t size() const { return instructions_.size(); }
  [[nodiscard]] bool empty() const { return instructions_.empty(); }

  [[nodiscard]] const std::vector<std::string>& qubits() const {
    return qubits_;
  }
  [[nodiscard]] std::size_t num_qubits() const { return qubits_.size(); }
  [[nodiscard]] std::optional<QubitIndex>
  find_qubit(std::string_view name) const;
  [[nodiscard]] const std::string& qubit_name(QubitIndex q) const {
    return qubits_.at(static_cast<std::size_t>(q));
  }

  friend bool operator==(const InstructionSequence& a,
                         const InstructionSequence& b) {
    return a.instructions_ == b.instructions_ && a.qubits_ == b.qubits_;
  }

private:
  std::vector<Instruction> instructions_;
  std::vector<std::string> qubits_;
  std::unordered_map<std::string, QubitIndex> qubit_index_;
};

/// Grammar: one instruction per line, `[L:] GATE q0[,q1]`, `#` comments.
/// Gate names are case-insensitive. Errors carry the 1-based line number.
[[nodiscard]] InstructionSequence parse_qasm(std::string_view text);
[[nodiscard]] InstructionSequence load_qasm(const std::string& path);
[[nodiscard]] std::string to_qasm(const InstructionSequence& seq);

/// Dataflow nodes: ids [0, n) are instructions, [n, n + q) are the dummy
/// input nodes of each qubit.
struct DataflowArc {
  int from = 0;
  int to = 0;
  QubitIndex qubit = 0;
  friend bool operator==(const DataflowArc&, const DataflowArc&) = default;
};

class DataflowGraph {
public:
  DataflowGraph() = default;
  DataflowGraph(std::size_t num_instructions, std::size_t num_qubits,
                std::vector<DataflowArc> arcs);

  [[nodiscard]] std::size_t num_instructions() const { return num_instr_; }
  [[nodiscard]] std::size_t num_qubits() const { return num_qubits_; }
  [[nodiscard]] std::size_t num_nodes() const { return num_instr_ + num_qubits_; }
  [[nodiscard]] int input_node(QubitIndex q) const {
    return static_cast<int>(num_instr_) + q;
  }
  [[nodiscard]] bool is_input(int node) const {
    return node >= static_cast<int>(num_instr_);
  }

  [[nodiscard]] const std::vector<DataflowArc>& arcs() const { return arcs_; }
  /// Arc indices leaving / entering a node.
  [[nodiscard]] const std::vector<int>& out_arcs(int node) const {
    return out_.at(static_cast<std::size_t>(node));
  }
  [[nodiscard]] const std::vector<int>& in_arcs(int node) const {
    return in_.at(static_cast<std::size_t>(node));
  }
  /// Arc indices along one qubit, from its input node to its last use.
  [[nodiscard]] const std::vector<int>& qubit_chain(QubitIndex q) const {
    return chains_.at(static_cast<std::size_t>(q));
  }

  /// Node ids in a topological order (inputs first, then instructions).
  [[nodiscard]] std::vector<int> topological_order() const;
  [[nodiscard]] bool is_acyclic() const;

private:
  std::size_t num_instr_ = 0;
  std::size_t num_qubits_ = 0;
  std::vector<DataflowArc> arcs_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;
  std::vector<std::vector<int>> chains_;
};

[[nodiscard]] DataflowGraph build_dataflow(const InstructionSequence& seq);

/// Sorted `from -> to qubit` edge list, inputs written as `in(<qubit>)`.
[[nodiscard]] std::string dump_dataflow(const DataflowGraph& graph,
                                        const InstructionSequence& seq);

} // namespace qpnr
