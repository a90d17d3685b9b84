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

#include <cstdint>
#include <limits>
#include <stdexcept>

namespace qpnr {

/// Time in whole microseconds.
using Time = std::int64_t;

inline constexpr Time kUnreachable = std::numeric_limits<Time>::max() / 4;

struct TechnologyParams {
  Time t_one_qubit_gate = 1;
  Time t_two_qubit_gate = 10;
  Time t_measure = 50;
  Time t_straight = 1;
  Time t_turn = 3;

  /// Throws std::invalid_argument unless all values are positive and a turn
  /// is strictly slower than a straight traversal.
  void validate() const {
    if (t_one_qubit_gate <= 0 || t_two_qubit_gate <= 0 || t_measure <= 0 ||
        t_straight <= 0 || t_turn <= 0) {
      throw std::invalid_argument("technology latencies must be positive");
    }
    if (t_turn <= t_straight) {
      throw std::invalid_argument("t_turn must exceed t_straight");
    }
  }

  [[nodiscard]] Time turn_surcharge() const { return t_turn - t_straight; }

  friend bool operator==(const TechnologyParams&,
                         const TechnologyParams&) = default;
};

} // namespace qpnr
