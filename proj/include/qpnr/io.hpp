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
#include "qpnr/fabric.hpp"
#include "qpnr/priorities.hpp"
#include "qpnr/scheduler.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qpnr {

/// Malformed artifact file; carries the 1-based line number.
class FormatError : public std::runtime_error {
public:
  FormatError(const std::string& what, int line);
  [[nodiscard]] int line() const { return line_; }

private:
  int line_;
};

/// `<qubit name> <col>,<row>` per line, qubits in index order.
[[nodiscard]] std::string write_placement(const InstructionSequence& seq,
                                          const Layout& layout,
                                          const std::vector<BlockId>& initial);
/// Every qubit of `seq` must be listed once, on a distinct block.
[[nodiscard]] std::vector<BlockId> read_placement(std::string_view text,
                                                  const InstructionSequence& seq,
                                                  const Layout& layout);

/// `<instruction id> <location name>` per line, by instruction id.
[[nodiscard]] std::string write_assignment(const GateAssignment& assignment);
[[nodiscard]] GateAssignment read_assignment(std::string_view text);

/// Line-oriented dump of every schedule field; read_schedule inverts it.
[[nodiscard]] std::string write_schedule(const Schedule& schedule);
[[nodiscard]] Schedule read_schedule(std::string_view text);

/// JSON object: latency, area, block and gate-location counts, hop count,
/// and the stall report sorted by wait (longest first).
[[nodiscard]] std::string schedule_summary_json(const Schedule& schedule,
                                                const InstructionSequence& seq,
                                                const Layout& layout);

/// Whole file as a string; throws std::runtime_error if unreadable.
[[nodiscard]] std::string read_file(const std::string& path);
/// Throws std::runtime_error if the file cannot be written.
void write_file(const std::string& path, std::string_view text);

} // namespace qpnr
