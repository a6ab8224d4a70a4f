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

#ifndef SIMULPLAN_GRID_ARENA_HPP_
#define SIMULPLAN_GRID_ARENA_HPP_

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/container/static_vector.hpp>

#include "simulplan/game.hpp"
#include "simulplan/types.hpp"

namespace simulplan::grid {

inline constexpr int kMaxSide = 15;
inline constexpr int kMaxCells = kMaxSide * kMaxSide;
inline constexpr int kMaxCapacity = 8;
inline constexpr int kMaxBombs = kMaxPlayers * kMaxCapacity;
inline constexpr int kNumMoves = 6;

enum class Move : std::uint8_t { kStop = 0, kUp = 1, kDown = 2, kLeft = 3, kRight = 4, kBomb = 5 };

inline Action to_action(Move m) { return Action{static_cast<std::uint8_t>(m)}; }
inline Move to_move(Action a) { return static_cast<Move>(a.id); }
const char* move_name(Move m);

enum class Tile : std::uint8_t { kPassage = 0, kRigid = 1, kWood = 2, kExtraBomb = 3, kBlastRange = 4 };

inline bool is_powerup(Tile t) { return t == Tile::kExtraBomb || t == Tile::kBlastRange; }

struct Position {
  int row = 0;
  int col = 0;

  friend constexpr bool operator==(Position, Position) = default;
};

/// Position reached by `m`; Stop and Bomb stay in place.
Position moved(Position p, Move m);

struct Bomb {
  Position pos;
  std::uint8_t owner = 0;
  std::uint8_t fuse = 0;  // ticks until explosion
  std::uint8_t strength = 0;
};

struct Agent {
  Position pos;
  bool alive = true;
  std::uint8_t capacity = 1;
  std::uint8_t strength = 2;
  std::uint8_t bombs_in_play = 0;
};

struct GridConfig {
  int height = 11;
  int width = 11;
  int num_players = 4;
  int step_limit = 800;
  int fuse = 9;
  int flame_life = 2;
  int blast_strength = 2;
  int bomb_capacity = 1;
  int num_rigid = 36;
  int num_wood = 36;
  /// Fraction of wooden walls hiding a power-up.
  double powerup_ratio = 0.5;

  /// Four-player free-for-all with the 800-step episode limit.
  static GridConfig ffa() { return {}; }
  /// Four-player free-for-all with the 200-step episode limit.
  static GridConfig ffa_fast();
  /// Two players on diagonal corners.
  static GridConfig duel(int step_limit = 800);

  void validate() const;
  std::string describe() const;
  static GridConfig parse(const std::string& description);

  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

using CellMask = std::bitset<kMaxCells>;

/// Full state of a GridArena game. A plain value: stepping returns a copy.
class GridState {
 public:
  /// Deterministic board for a seed: corner-symmetric walls, all spawn corners
  /// mutually reachable when wooden walls are treated as passable.
  static GridState generate(const GridConfig& config, std::uint64_t seed);

  /// Hand-built board for tests and tools. Characters: '.' passage, '#' rigid,
  /// 'w' wood, 'e' extra-bomb power-up, 'r' blast-range power-up, '0'..'3'
  /// agent on a passage. Agents absent from the layout start dead.
  static GridState from_layout(const GridConfig& config, const std::vector<std::string>& rows);

  // GameState interface.
  int num_players() const { return config_.num_players; }
  bool is_acting(PlayerId p) const { return !is_terminal() && agent(p).alive; }
  ActionList legal_actions(PlayerId p) const { return masked_actions(p); }
  bool is_terminal() const;
  GridState step(const JointAction& joint) const;
  int terminal_reward(PlayerId p) const;
  /// Reward-function estimate: +1 sole survivor, -1 dead, 0 otherwise.
  double heuristic_value(PlayerId p) const;
  StateKey canonical_key() const;
  std::string serialize() const;

  /// Actions that do not walk into walls, bombs or next-tick flames and do not
  /// exceed bomb capacity. Never empty: falls back to {Stop} when every action
  /// is fatal. Throws for dead players and terminal states.
  ActionList masked_actions(PlayerId p) const;

  /// Tiles that will hold flames during the next tick's death check if no new
  /// bombs are placed: current flames plus the blasts of bombs that explode
  /// next tick (including chains).
  CellMask next_tick_flames() const;

  /// Blast footprint of `bomb` on the current walls.
  CellMask blast_footprint(const Bomb& bomb) const;

  int height() const { return config_.height; }
  int width() const { return config_.width; }
  const GridConfig& config() const { return config_; }
  bool in_bounds(Position p) const {
    return p.row >= 0 && p.row < config_.height && p.col >= 0 && p.col < config_.width;
  }
  int cell(Position p) const { return p.row * config_.width + p.col; }
  Position position_of(int cell) const { return {cell / config_.width, cell % config_.width}; }

  Tile tile(Position p) const { return tiles_[static_cast<std::size_t>(cell(p))]; }
  /// Power-up hidden under a wooden wall (kPassage when none).
  Tile hidden(Position p) const { return hidden_[static_cast<std::size_t>(cell(p))]; }
  int flame(Position p) const { return flames_[static_cast<std::size_t>(cell(p))]; }
  const Bomb* bomb_at(Position p) const;
  const boost::container::static_vector<Bomb, kMaxBombs>& bombs() const { return bombs_; }
  const Agent& agent(PlayerId p) const { return agents_[static_cast<std::size_t>(p.index)]; }
  int step_count() const { return step_; }
  int alive_count() const;
  /// True if a player can stand on / walk onto the tile (ignores agents).
  bool walkable(Position p) const;

  // Setup helpers for hand-built scenarios.
  void set_tile(Position p, Tile t) { tiles_[static_cast<std::size_t>(cell(p))] = t; }
  void set_hidden(Position p, Tile t) { hidden_[static_cast<std::size_t>(cell(p))] = t; }
  void set_flame(Position p, int ticks) {
    flames_[static_cast<std::size_t>(cell(p))] = static_cast<std::uint8_t>(ticks);
  }
  void add_bomb(const Bomb& bomb);
  Agent& mutable_agent(PlayerId p) { return agents_[static_cast<std::size_t>(p.index)]; }
  void set_step_count(int step) { step_ = step; }

 private:
  explicit GridState(const GridConfig& config);

  struct Explosion {
    CellMask flames;
    std::bitset<kMaxBombs> exploded;
  };
  Explosion resolve_explosions(std::bitset<kMaxBombs> initial) const;
  void trace_blast(const Bomb& bomb, CellMask& out) const;

  GridConfig config_;
  std::array<Tile, kMaxCells> tiles_{};
  std::array<Tile, kMaxCells> hidden_{};
  std::array<std::uint8_t, kMaxCells> flames_{};
  boost::container::static_vector<Bomb, kMaxBombs> bombs_;
  std::array<Agent, kMaxPlayers> agents_{};
  int step_ = 0;
};

static_assert(GameState<GridState>);

std::vector<Position> spawn_positions(const GridConfig& config);

/// Text rendering (same alphabet as from_layout plus 'B' bomb, '*' flame).
std::string render(const GridState& state);

/// Seed plus per-step joint actions; enough to reproduce a game exactly.
struct Replay {
  GridConfig config;
  std::uint64_t seed = 0;
  std::vector<JointAction> steps;
  /// Key of the final state as recorded; checked by play_replay when set.
  std::optional<std::uint64_t> final_key;
};

/// Line-delimited text: a header, `config`, `seed`, one `step` line per joint
/// action, and `end <final key>`.
std::string write_replay(const Replay& replay);
Replay read_replay(const std::string& text);
/// Regenerates the board from the seed and applies every recorded step.
GridState play_replay(const Replay& replay);

}  // namespace simulplan::grid

#endif  // SIMULPLAN_GRID_ARENA_HPP_
