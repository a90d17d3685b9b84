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

#include <string>
#include <vector>

namespace qpnr {

/// [[7,1,3]] encoder: 7 qubits, 21 gates.
[[nodiscard]] InstructionSequence steane_encode();
/// [[23,1,7]] encoder built from the systematic generator of the even
/// subcode: 23 qubits, 116 gates.
[[nodiscard]] InstructionSequence golay_encode();
/// One Z and one X syndrome round of Steane-style correction with two
/// ancilla blocks, plus one representative correction per round: 21 qubits,
/// 136 gates.
[[nodiscard]] InstructionSequence steane_correct();
/// Two-level concatenated [[7,1,3]] encoder: 49 qubits, 245 gates.
[[nodiscard]] InstructionSequence steane_encode_l2();
/// Nine-instruction, four-qubit example with paths A-E-I and C-F-G-H-I.
[[nodiscard]] InstructionSequence example_circuit();

struct Benchmark {
  std::string name;
  InstructionSequence circuit;
};

/// The four error-correction benchmarks in a fixed order.
[[nodiscard]] std::vector<Benchmark> benchmark_suite();

} // namespace qpnr
