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

#include "qpnr/benchmarks.hpp"

#include <array>
#include <utility>

namespace qpnr {

namespace {

std::string name(const std::string& prefix, int index) {
  return prefix + std::to_string(index);
}

// Each encoder stage is a (control, target) list over one block of seven.
constexpr std::array<std::pair<int, int>, 9> kSteaneFanout{{
    {0, 2}, {0, 4}, {0, 6}, {1, 2}, {1, 5}, {1, 6}, {3, 4}, {3, 5}, {3, 6}}};
constexpr std::array<int, 3> kSteaneHadamards{0, 1, 3};

void prep_block(InstructionSequence& seq, const std::string& block) {
  for (int i = 0; i < 7; ++i) {
    seq.add(GateKind::Prep, {name(block, i)});
  }
}

// |0_L> from |0000000>.
void steane_zero(InstructionSequence& seq, const std::string& block) {
  prep_block(seq, block);
  for (int h : kSteaneHadamards) {
    seq.add(GateKind::H, {name(block, h)});
  }
  for (auto [c, t] : kSteaneFanout) {
    seq.add(GateKind::CX, {name(block, c), name(block, t)});
  }
}

// |+_L>: the |0_L> circuit conjugated by transversal H.
void steane_plus(InstructionSequence& seq, const std::string& block) {
  prep_block(seq, block);
  for (int h : {2, 4, 5, 6}) {
    seq.add(GateKind::H, {name(block, h)});
  }
  for (auto [c, t] : kSteaneFanout) {
    seq.add(GateKind::CX, {name(block, t), name(block, c)});
  }
}

void transversal_cx(InstructionSequence& seq, const std::string& control,
                    const std::string& target) {
  for (int i = 0; i < 7; ++i) {
    seq.add(GateKind::CX, {name(control, i), name(target, i)});
  }
}

void transversal(InstructionSequence& seq, GateKind gate, const std::string& block) {
  for (int i = 0; i < 7; ++i) {
    seq.add(gate, {name(block, i)});
  }
}

} // namespace

InstructionSequence steane_encode() {
  InstructionSequence seq;
  prep_block(seq, "q");
  seq.add(GateKind::CX, {"q2", "q4"});
  seq.add(GateKind::CX, {"q2", "q5"});
  for (int h : kSteaneHadamards) {
    seq.add(GateKind::H, {name("q", h)});
  }
  for (auto [c, t] : kSteaneFanout) {
    seq.add(GateKind::CX, {name("q", c), name("q", t)});
  }
  return seq;
}

InstructionSequence golay_encode() {
  constexpr int n = 23;
  constexpr int k = 11;
  constexpr int data = 11;
  // (1 + x) g(x) with g the Golay generator 1 + x^2 + x^4 + x^5 + x^6 + x^10 + x^11.
  std::array<int, n> gen{};
  for (int e : {0, 2, 4, 5, 6, 10, 11}) {
    gen[static_cast<std::size_t>(e)] ^= 1;
    gen[static_cast<std::size_t>(e + 1)] ^= 1;
  }
  std::array<std::array<int, n>, k> rows{};
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c + r < n; ++c) {
      rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c + r)] =
          gen[static_cast<std::size_t>(c)];
    }
  }
  // Back-substitute to the systematic form with pivots 0..k-1.
  for (int p = k - 1; p >= 0; --p) {
    for (int r = 0; r < p; ++r) {
      if (rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(p)] != 0) {
        for (int c = 0; c < n; ++c) {
          rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] ^=
              rows[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)];
        }
      }
    }
  }

  InstructionSequence seq;
  for (int q = 0; q < n; ++q) {
    if (q != data) {
      seq.add(GateKind::Prep, {name("q", q)});
    }
  }
  // A weight-7 odd-coset word clear of the pivot columns carries the data.
  for (int t : {13, 15, 16, 17, 21, 22}) {
    seq.add(GateKind::CX, {name("q", data), name("q", t)});
  }
  for (int p = 0; p < k; ++p) {
    seq.add(GateKind::H, {name("q", p)});
  }
  for (int p = 0; p < k; ++p) {
    for (int c = k; c < n; ++c) {
      if (rows[static_cast<std::size_t>(p)][static_cast<std::size_t>(c)] != 0) {
        seq.add(GateKind::CX, {name("q", p), name("q", c)});
      }
    }
  }
  return seq;
}

InstructionSequence steane_correct() {
  InstructionSequence seq;
  // Z round: ancilla A in |0_L> verified against B, then copies data errors.
  steane_zero(seq, "a");
  steane_zero(seq, "b");
  transversal_cx(seq, "a", "b");
  transversal(seq, GateKind::Measure, "b");
  transversal_cx(seq, "d", "a");
  transversal(seq, GateKind::Measure, "a");
  seq.add(GateKind::X, {"d0"});
  // X round on |+_L> ancillas.
  steane_plus(seq, "a");
  steane_plus(seq, "b");
  transversal_cx(seq, "b", "a");
  transversal(seq, GateKind::Measure, "b");
  transversal_cx(seq, "a", "d");
  transversal(seq, GateKind::Measure, "a");
  seq.add(GateKind::Z, {"d0"});
  return seq;
}

InstructionSequence steane_encode_l2() {
  InstructionSequence seq;
  auto block = [](int b) { return "b" + std::to_string(b) + "q"; };
  for (int b = 0; b < 7; ++b) {
    prep_block(seq, block(b));
    seq.add(GateKind::CX, {name(block(b), 2), name(block(b), 4)});
    seq.add(GateKind::CX, {name(block(b), 2), name(block(b), 5)});
    for (int h : kSteaneHadamards) {
      seq.add(GateKind::H, {name(block(b), h)});
    }
    for (auto [c, t] : kSteaneFanout) {
      seq.add(GateKind::CX, {name(block(b), c), name(block(b), t)});
    }
  }
  // The same encoder applied to logical qubits, transversally.
  transversal_cx(seq, block(2), block(4));
  transversal_cx(seq, block(2), block(5));
  for (int h : kSteaneHadamards) {
    transversal(seq, GateKind::H, block(h));
  }
  for (auto [c, t] : kSteaneFanout) {
    transversal_cx(seq, block(c), block(t));
  }
  return seq;
}

InstructionSequence example_circuit() {
  InstructionSequence seq;
  seq.add(GateKind::H, {"Q0"}, 'A');
  seq.add(GateKind::H, {"Q1"}, 'B');
  seq.add(GateKind::H, {"Q2"}, 'C');
  seq.add(GateKind::H, {"Q3"}, 'D');
  seq.add(GateKind::CX, {"Q0", "Q1"}, 'E');
  seq.add(GateKind::CX, {"Q2", "Q3"}, 'F');
  seq.add(GateKind::CX, {"Q1", "Q2"}, 'G');
  seq.add(GateKind::CX, {"Q2", "Q3"}, 'H');
  seq.add(GateKind::CX, {"Q0", "Q2"}, 'I');
  return seq;
}

std::vector<Benchmark> benchmark_suite() {
  return {{"l1_encode", steane_encode()},
          {"golay_encode", golay_encode()},
          {"l1_correct", steane_correct()},
          {"l2_encode", steane_encode_l2()}};
}

} // namespace qpnr
