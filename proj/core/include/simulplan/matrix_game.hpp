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

#ifndef SIMULPLAN_MATRIX_GAME_HPP_
#define SIMULPLAN_MATRIX_GAME_HPP_

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "simulplan/game.hpp"
#include "simulplan/types.hpp"

namespace simulplan::matrix {

/// A simultaneous matrix game repeated for `horizon` rounds. Each joint
/// action pays every player a reward in {-1, 0, +1}; the outcome of a play is
/// the sign of each player's cumulative payoff.
class MatrixGame {
 public:
  /// `payoffs[j][p]` is player p's reward for the joint action with flat index
  /// j (row-major, player 0 most significant).
  MatrixGame(std::string name, std::vector<int> num_actions,
             std::vector<std::array<int, kMaxPlayers>> payoffs, int horizon = 1);

  /// Two-player zero-sum game given by player 0's payoff matrix.
  static MatrixGame zero_sum(std::string name, const std::vector<std::vector<int>>& row_payoff,
                             int horizon = 1);

  /// Parses the JSON game description used by config files.
  static MatrixGame from_json(std::string_view text);
  static MatrixGame load(const std::string& path);

  const std::string& name() const { return name_; }
  int num_players() const { return static_cast<int>(num_actions_.size()); }
  int num_actions(PlayerId p) const { return num_actions_[static_cast<std::size_t>(p.index)]; }
  int horizon() const { return horizon_; }
  int num_joint_actions() const { return static_cast<int>(payoffs_.size()); }

  int joint_index(const JointAction& joint) const;
  JointAction joint_from_index(int index) const;
  int payoff(int joint_index, PlayerId p) const {
    return payoffs_[static_cast<std::size_t>(joint_index)][static_cast<std::size_t>(p.index)];
  }

 private:
  std::string name_;
  std::vector<int> num_actions_;
  std::vector<std::array<int, kMaxPlayers>> payoffs_;
  int horizon_ = 1;
};

class MatrixState {
 public:
  explicit MatrixState(std::shared_ptr<const MatrixGame> game);

  int num_players() const { return game_->num_players(); }
  bool is_acting(PlayerId) const { return !is_terminal(); }
  ActionList legal_actions(PlayerId p) const;
  bool is_terminal() const { return round_ >= game_->horizon(); }
  MatrixState step(const JointAction& joint) const;
  int terminal_reward(PlayerId p) const;
  /// Sign of the cumulative payoff so far.
  double heuristic_value(PlayerId p) const;
  StateKey canonical_key() const;
  std::string serialize() const;

  int round() const { return round_; }
  int cumulative(PlayerId p) const { return cumulative_[static_cast<std::size_t>(p.index)]; }
  const MatrixGame& game() const { return *game_; }

 private:
  std::shared_ptr<const MatrixGame> game_;
  int round_ = 0;
  std::array<int, kMaxPlayers> cumulative_{};
};

static_assert(GameState<MatrixState>);

/// Opponent mixed strategies, indexed by player. The entry of the player whose
/// Q values are requested is ignored.
using OpponentPolicy = std::vector<std::vector<double>>;

OpponentPolicy uniform_policy(const MatrixGame& game);

/// Exact Q_i(s0, a_i) for every action of `player`, by enumeration of every
/// joint action weighted by the opponents' policy. In later rounds of a
/// repeated game `player` itself plays uniformly at random, which is the
/// rollout assumption Monte Carlo search makes.
std::vector<double> brute_force_q(const MatrixGame& game, PlayerId player,
                                  const OpponentPolicy& opponent_policy);

// Built-in games.
MatrixGame rock_paper_scissors();
MatrixGame matching_pennies();
/// 3x3 zero-sum game where player 0's first action strictly dominates.
MatrixGame dominance_game();
/// 4x4 zero-sum game with a unique best response to a uniform opponent that
/// is not dominant.
MatrixGame skewed_game();

}  // namespace simulplan::matrix

#endif  // SIMULPLAN_MATRIX_GAME_HPP_
