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

#include "qpnr/fabric.hpp"

#include <string>
#include <vector>

namespace qpnr {

/// Three characters by three per block: the centre names the kind (G gate
/// channel, D dead end, + four-way, T three-way, L turn, straight channels
/// draw their lane) and open ports extend as - or |. Rows run north to
/// south; empty positions are blank.
[[nodiscard]] std::string render_ascii(const Layout& layout);

/// Standalone SVG drawing: one square per block, channels as lines
/// through open ports, gate locations shaded and labelled. `initial`, if
/// given, marks each qubit's starting block with its index.
[[nodiscard]] std::string render_svg(const Layout& layout,
                                     const std::vector<BlockId>& initial = {});

} // namespace qpnr
