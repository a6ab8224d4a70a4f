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

#ifndef SIMULPLAN_GAME_HPP_
#define SIMULPLAN_GAME_HPP_

#include <concepts>
#include <string>

#include "simulplan/types.hpp"

namespace simulplan {

/// A simultaneous-move game state. States are immutable values: `step`
/// returns a successor and never mutates its input, so planners can branch
/// freely from any state they hold.
///
/// Terminal rewards are ternary (+1 win, 0 draw, -1 loss). `heuristic_value`
/// is the environment's reward-function estimate for a non-terminal state and
/// must lie in [-1, 1]. `canonical_key` must agree for exactly the states that
/// are behaviorally identical.
template <class S>
concept GameState = std::copyable<S> &&
    requires(const S& s, PlayerId p, const JointAction& joint) {
      { s.num_players() } -> std::convertible_to<int>;
      { s.is_acting(p) } -> std::same_as<bool>;
      { s.legal_actions(p) } -> std::same_as<ActionList>;
      { s.is_terminal() } -> std::same_as<bool>;
      { s.step(joint) } -> std::same_as<S>;
      { s.terminal_reward(p) } -> std::same_as<int>;
      { s.heuristic_value(p) } -> std::convertible_to<double>;
      { s.canonical_key() } -> std::same_as<StateKey>;
      { s.serialize() } -> std::same_as<std::string>;
    };

template <GameState S>
ActionList legal_actions(const S& state, PlayerId player) {
  return state.legal_actions(player);
}

template <GameState S>
S step(const S& state, const JointAction& joint) {
  return state.step(joint);
}

template <GameState S>
int terminal_reward(const S& state, PlayerId player) {
  return state.terminal_reward(player);
}

template <GameState S>
bool is_legal(const S& state, PlayerId player, Action a) {
  for (Action legal : state.legal_actions(player)) {
    if (legal == a) return true;
  }
  return false;
}

}  // namespace simulplan

#endif  // SIMULPLAN_GAME_HPP_
