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

#include "simulplan/rule_agent.hpp"

#include <algorithm>
#include <deque>
#include <vector>

#include "simulplan/rng.hpp"

namespace simulplan::grid {
namespace {

constexpr std::array<Move, 4> kDirections = {Move::kUp, Move::kDown, Move::kLeft, Move::kRight};
constexpr int kEscapeHorizon = 24;

std::uint64_t window(int from, int length) {
  std::uint64_t m = 0;
  for (int t = from; t < from + length; ++t) {
    if (t >= 1 && t <= 64) m |= std::uint64_t{1} << (t - 1);
  }
  return m;
}

bool contains(const ActionList& actions, Move m) {
  return std::find(actions.begin(), actions.end(), to_action(m)) != actions.end();
}

}  // namespace

DangerMap::DangerMap(const GridState& state) : width_(state.width()) {
  const auto& bombs = state.bombs();
  std::vector<CellMask> footprints;
  std::vector<int> fuse;
  footprints.reserve(bombs.size());
  for (const Bomb& b : bombs) {
    footprints.push_back(state.blast_footprint(b));
    fuse.push_back(b.fuse);
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t a = 0; a < bombs.size(); ++a) {
      for (std::size_t b = 0; b < bombs.size(); ++b) {
        if (a != b && fuse[a] < fuse[b] &&
            footprints[a].test(static_cast<std::size_t>(state.cell(bombs[b].pos)))) {
          fuse[b] = fuse[a];
          changed = true;
        }
      }
    }
  }
  const int life = state.config().flame_life;
  const int cells = state.height() * state.width();
  for (int c = 0; c < cells; ++c) {
    const int f = state.flame(state.position_of(c));
    if (f > 0) mask_[static_cast<std::size_t>(c)] |= window(1, f);
  }
  for (std::size_t i = 0; i < bombs.size(); ++i) {
    const std::uint64_t w = window(fuse[i], life);
    for (int c = 0; c < cells; ++c) {
      if (footprints[i].test(static_cast<std::size_t>(c))) mask_[static_cast<std::size_t>(c)] |= w;
    }
  }
}

int escape_move(const GridState& state, PlayerId player, const DangerMap& danger) {
  const Position start = state.agent(player).pos;
  if (!danger.threatened(start)) return static_cast<int>(Move::kStop);

  struct Node {
    Position pos;
    int tick;
    int first;
  };
  const int cells = state.height() * state.width();
  std::vector<char> seen(static_cast<std::size_t>(cells * (kEscapeHorizon + 1)), 0);
  std::deque<Node> queue{{start, 0, -1}};
  while (!queue.empty()) {
    const Node n = queue.front();
    queue.pop_front();
    if (n.tick >= kEscapeHorizon) continue;
    for (Move m : {Move::kStop, Move::kUp, Move::kDown, Move::kLeft, Move::kRight}) {
      const Position next = moved(n.pos, m);
      if (m != Move::kStop && !state.walkable(next)) continue;
      const int tick = n.tick + 1;
      if (danger.unsafe_at(next, tick)) continue;
      const int first = n.first < 0 ? static_cast<int>(m) : n.first;
      if (!danger.threatened(next)) return first;
      auto& flag = seen[static_cast<std::size_t>(tick * cells + state.cell(next))];
      if (flag) continue;
      flag = 1;
      queue.push_back({next, tick, first});
    }
  }
  return -1;
}

Action rule_based_action(const GridState& state, PlayerId player, std::uint64_t seed) {
  const ActionList legal = state.masked_actions(player);
  const Agent& me = state.agent(player);
  Rng rng = make_rng(seed, {state.canonical_key().hash, static_cast<std::uint64_t>(player.index)});
  std::array<Move, 4> order = kDirections;
  std::shuffle(order.begin(), order.end(), rng);

  const DangerMap danger(state);

  // 1. Get out of any blast that is coming.
  if (danger.threatened(me.pos)) {
    const int m = escape_move(state, player, danger);
    if (m >= 0 && contains(legal, static_cast<Move>(m))) return to_action(static_cast<Move>(m));
    for (Action a : legal) {
      if (!danger.threatened(moved(me.pos, to_move(a)))) return a;
    }
    return legal.front();
  }

  // 2. Adjacent power-up.
  for (Move m : order) {
    const Position next = moved(me.pos, m);
    if (contains(legal, m) && is_powerup(state.tile(next)) && !danger.threatened(next)) {
      return to_action(m);
    }
  }

  auto is_enemy_at = [&](Position p) {
    for (int q = 0; q < state.num_players(); ++q) {
      const Agent& other = state.agent(PlayerId{q});
      if (q != player.index && other.alive && other.pos == p) return true;
    }
    return false;
  };

  // 3. Bomb wood or an enemy in range, if a retreat exists afterwards.
  if (contains(legal, Move::kBomb)) {
    const Bomb planned{me.pos, static_cast<std::uint8_t>(player.index),
                       static_cast<std::uint8_t>(state.config().fuse), me.strength};
    bool worthwhile = false;
    for (Move m : kDirections) {
      const Position next = moved(me.pos, m);
      if (state.in_bounds(next) && state.tile(next) == Tile::kWood) worthwhile = true;
    }
    if (!worthwhile) {
      const CellMask blast = state.blast_footprint(planned);
      for (int q = 0; q < state.num_players(); ++q) {
        const Agent& other = state.agent(PlayerId{q});
        if (q != player.index && other.alive && blast.test(static_cast<std::size_t>(state.cell(other.pos)))) {
          worthwhile = true;
        }
      }
    }
    if (worthwhile) {
      GridState with_bomb = state;
      with_bomb.add_bomb(planned);
      const DangerMap after(with_bomb);
      if (escape_move(with_bomb, player, after) >= 0) return to_action(Move::kBomb);
    }
  }

  // 4. Walk toward the nearest tile next to wood or an enemy.
  {
    const int cells = state.height() * state.width();
    std::vector<int> first(static_cast<std::size_t>(cells), -2);
    std::deque<Position> queue{me.pos};
    first[static_cast<std::size_t>(state.cell(me.pos))] = -1;
    while (!queue.empty()) {
      const Position p = queue.front();
      queue.pop_front();
      const int via = first[static_cast<std::size_t>(state.cell(p))];
      if (via >= 0) {
        bool target = false;
        for (Move m : kDirections) {
          const Position n = moved(p, m);
          if (state.in_bounds(n) && (state.tile(n) == Tile::kWood || is_enemy_at(n))) target = true;
        }
        if (target) {
          const Move m = static_cast<Move>(via);
          if (contains(legal, m)) return to_action(m);
          break;
        }
      }
      for (Move m : order) {
        const Position n = moved(p, m);
        if (!state.walkable(n) || danger.threatened(n) || is_enemy_at(n)) continue;
        auto& f = first[static_cast<std::size_t>(state.cell(n))];
        if (f != -2) continue;
        f = via >= 0 ? via : static_cast<int>(m);
        queue.push_back(n);
      }
    }
  }

  // 5. Nothing to do.
  if (contains(legal, Move::kStop)) return to_action(Move::kStop);
  return legal.front();
}

}  // namespace simulplan::grid
