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

#include "qpnr/scheduler.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace qpnr {

namespace {

constexpr Time kForever = kUnreachable;

struct Interval {
  QubitIndex qubit;
  Time start;
  Time end;
};

std::string str(Time t) { return std::to_string(t); }

} // namespace

std::vector<std::string> validate_schedule(const Schedule& s,
                                           const InstructionSequence& seq,
                                           const Layout& layout,
                                           const TechnologyParams& tech) {
  std::vector<std::string> errors;
  const auto graph = derive_movement_graph(layout, tech);
  const auto n = seq.size();
  const auto num_qubits = seq.num_qubits();

  if (s.initial.size() != num_qubits) {
    errors.push_back("initial placement size mismatch");
    return errors;
  }
  if (std::set<BlockId>(s.initial.begin(), s.initial.end()).size() !=
      s.initial.size()) {
    errors.push_back("initial placement shares a block");
  }
  if (s.gates.size() != n) {
    errors.push_back("gate event count mismatch");
    return errors;
  }

  Time latest = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& gate = s.gates[i];
    const auto& ins = seq[static_cast<InstrId>(i)];
    const std::string who = "instruction " + std::to_string(i);
    if (gate.instruction != static_cast<InstrId>(i)) {
      errors.push_back(who + ": event out of place");
    }
    if (gate.block < 0 || static_cast<std::size_t>(gate.block) >= layout.size() ||
        !layout.block(gate.block).has_gate()) {
      errors.push_back(who + ": not at a gate location");
      continue;
    }
    if (gate.end - gate.start != gate_latency(ins.gate, tech)) {
      errors.push_back(who + ": wrong duration");
    }
    if (gate.qubits != ins.operands) {
      errors.push_back(who + ": wrong operands");
    }
    latest = std::max(latest, gate.end);
  }

  const auto dataflow = build_dataflow(seq);
  for (const auto& arc : dataflow.arcs()) {
    if (dataflow.is_input(arc.from)) {
      continue;
    }
    if (s.gates[static_cast<std::size_t>(arc.to)].start <
        s.gates[static_cast<std::size_t>(arc.from)].end) {
      errors.push_back("instruction " + std::to_string(arc.to) +
                       " starts before producer " + std::to_string(arc.from) +
                       " ends");
    }
  }

  // Replay each ion's hops into occupancy intervals.
  std::vector<std::vector<const HopEvent*>> per_qubit(num_qubits);
  for (const auto& hop : s.hops) {
    if (hop.qubit < 0 || static_cast<std::size_t>(hop.qubit) >= num_qubits) {
      errors.push_back("hop of unknown qubit");
      continue;
    }
    per_qubit[static_cast<std::size_t>(hop.qubit)].push_back(&hop);
    latest = std::max(latest, hop.end);
  }
  std::map<BlockId, std::vector<Interval>> occupancy;
  for (std::size_t q = 0; q < num_qubits; ++q) {
    auto& hops = per_qubit[q];
    std::stable_sort(hops.begin(), hops.end(), [](const auto* a, const auto* b) {
      return a->start < b->start;
    });
    const std::string who = "qubit " + seq.qubit_name(static_cast<QubitIndex>(q));
    BlockId at = s.initial[q];
    Time since = 0;
    Time free_at = 0;
    const HopEvent* previous = nullptr;
    std::set<int> finished_routes;
    for (const auto* hop : hops) {
      if (hop->from != at) {
        errors.push_back(who + ": hop at " + str(hop->start) + " is not contiguous");
      }
      if (hop->start < free_at) {
        errors.push_back(who + ": overlapping hops at " + str(hop->start));
      }
      const auto dir = graph.direction_between(hop->from, hop->to);
      if (!dir) {
        errors.push_back(who + ": hop at " + str(hop->start) + " is not an edge");
      } else {
        const bool continues = previous && previous->route == hop->route;
        if (!continues && finished_routes.count(hop->route)) {
          errors.push_back(who + ": route " + std::to_string(hop->route) +
                           " resumed");
        }
        std::optional<Direction> last;
        if (continues) {
          last = graph.direction_between(previous->from, previous->to);
        } else if (previous) {
          finished_routes.insert(previous->route);
        }
        if (hop->end - hop->start != graph.hop_latency(last, *dir)) {
          errors.push_back(who + ": hop at " + str(hop->start) +
                           " has wrong latency");
        }
      }
      occupancy[at].push_back({static_cast<QubitIndex>(q), since, hop->end});
      at = hop->to;
      since = hop->start;
      free_at = hop->end;
      previous = hop;
    }
    occupancy[at].push_back({static_cast<QubitIndex>(q), since, kForever});
  }

  // Operands must sit at the gate block for the whole gate.
  for (std::size_t i = 0; i < n; ++i) {
    const auto& gate = s.gates[i];
    for (QubitIndex q : gate.qubits) {
      if (q < 0 || static_cast<std::size_t>(q) >= num_qubits) {
        continue;
      }
      const auto& ivs = occupancy[gate.block];
      const bool present = std::any_of(ivs.begin(), ivs.end(), [&](const Interval& iv) {
        return iv.qubit == q && iv.start <= gate.start && gate.end <= iv.end;
      });
      const bool still = std::none_of(
          per_qubit[static_cast<std::size_t>(q)].begin(),
          per_qubit[static_cast<std::size_t>(q)].end(), [&](const HopEvent* h) {
            return h->start < gate.end && gate.start < h->end;
          });
      if (!present || !still) {
        errors.push_back("instruction " + std::to_string(i) + ": operand " +
                         seq.qubit_name(q) + " not held at the gate");
      }
    }
  }

  for (const auto& [block, ivs] : occupancy) {
    for (std::size_t a = 0; a < ivs.size(); ++a) {
      for (std::size_t b = a + 1; b < ivs.size(); ++b) {
        if (ivs[a].qubit == ivs[b].qubit) {
          continue;
        }
        const Time lo = std::max(ivs[a].start, ivs[b].start);
        const Time hi = std::min(ivs[a].end, ivs[b].end);
        if (lo >= hi) {
          continue;
        }
        const std::set<QubitIndex> pair{ivs[a].qubit, ivs[b].qubit};
        const bool shared_gate =
            std::any_of(s.gates.begin(), s.gates.end(), [&](const GateEvent& g) {
              return g.block == block &&
                     std::set<QubitIndex>(g.qubits.begin(), g.qubits.end()) == pair &&
                     lo <= g.start && g.end <= hi;
            });
        if (!shared_gate) {
          errors.push_back("block " + std::to_string(block) + " shared by " +
                           seq.qubit_name(ivs[a].qubit) + " and " +
                           seq.qubit_name(ivs[b].qubit) + " at " + str(lo));
        }
      }
    }
  }

  std::map<BlockId, std::vector<const GateEvent*>> by_block;
  for (const auto& gate : s.gates) {
    by_block[gate.block].push_back(&gate);
  }
  for (auto& [block, gates] : by_block) {
    std::sort(gates.begin(), gates.end(),
              [](const auto* a, const auto* b) { return a->start < b->start; });
    for (std::size_t k = 1; k < gates.size(); ++k) {
      if (gates[k]->start < gates[k - 1]->end) {
        errors.push_back("gate location " + std::to_string(block) +
                         " runs two gates at " + str(gates[k]->start));
      }
    }
  }

  if (s.total_latency != latest) {
    errors.push_back("total latency " + str(s.total_latency) +
                     " differs from last event " + str(latest));
  }
  return errors;
}

} // namespace qpnr
