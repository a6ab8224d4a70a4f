// Copyright 2026 The simulplan Authors.
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

#ifndef SIMULPLAN_RULE_AGENT_HPP_
#define SIMULPLAN_RULE_AGENT_HPP_

#include <array>
#include <cstdint>

#include "simulplan/grid_arena.hpp"

namespace simulplan::grid {

/// Per-tile set of future ticks (bit t-1 for tick t, t >= 1) at which the
/// tile will hold flames, given only the bombs and flames already on the
/// board. Chained bombs inherit the earliest explosion time.
class DangerMap {
 public:
  explicit DangerMap(const GridState& state);

  std::uint64_t ticks(Position p) const { return mask_[static_cast<std::size_t>(cell(p))]; }
  bool threatened(Position p) const { return ticks(p) != 0; }
  bool unsafe_at(Position p, int tick) const {
    return tick >= 1 && tick <= 64 && ((ticks(p) >> (tick - 1)) & 1U) != 0;
  }

 private:
  int cell(Position p) const { return p.row * width_ + p.col; }

  int width_;
  std::array<std::uint64_t, kMaxCells> mask_{};
};

/// First move of a shortest path (waiting allowed) from the player's tile to a
/// tile no current bomb or flame will ever reach, never stepping onto a tile
/// at a tick when it burns. kStop when already safe, -1 when there is no
/// escape within the search horizon.
int escape_move(const GridState& state, PlayerId player, const DangerMap& danger);

/// Fixed opponent modelled on the reference simple agent's documented
/// priorities: escape blasts, grab adjacent power-ups, bomb wood or enemies
/// when a retreat exists, walk toward the nearest wood or enemy, else stop.
/// Pure function of (state, player, seed).
Action rule_based_action(const GridState& state, PlayerId player, std::uint64_t seed);

}  // namespace simulplan::grid

#endif  // SIMULPLAN_RULE_AGENT_HPP_
