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

#include "simulplan/grid_arena.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <sstream>

#include "simulplan/hash.hpp"
#include "simulplan/rng.hpp"

namespace simulplan::grid {

const char* move_name(Move m) {
  switch (m) {
    case Move::kStop:
      return "stop";
    case Move::kUp:
      return "up";
    case Move::kDown:
      return "down";
    case Move::kLeft:
      return "left";
    case Move::kRight:
      return "right";
    case Move::kBomb:
      return "bomb";
  }
  return "?";
}

Position moved(Position p, Move m) {
  switch (m) {
    case Move::kUp:
      return {p.row - 1, p.col};
    case Move::kDown:
      return {p.row + 1, p.col};
    case Move::kLeft:
      return {p.row, p.col - 1};
    case Move::kRight:
      return {p.row, p.col + 1};
    default:
      return p;
  }
}

GridConfig GridConfig::ffa_fast() {
  GridConfig c;
  c.step_limit = 200;
  return c;
}

GridConfig GridConfig::duel(int step_limit) {
  GridConfig c;
  c.num_players = 2;
  c.step_limit = step_limit;
  return c;
}

void GridConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("grid config: " + what); };
  if (height < 5 || height > kMaxSide || width < 5 || width > kMaxSide) {
    fail("board sides must be in [5, " + std::to_string(kMaxSide) + "]");
  }
  if (num_players != 2 && num_players != 4) fail("num_players must be 2 or 4");
  if (step_limit < 1) fail("step_limit must be >= 1");
  if (fuse < 1 || fuse > 255) fail("fuse must be in [1, 255]");
  if (flame_life < 1 || flame_life > 255) fail("flame_life must be in [1, 255]");
  if (blast_strength < 1 || blast_strength > std::max(height, width)) fail("blast_strength out of range");
  if (bomb_capacity < 1 || bomb_capacity > kMaxCapacity) fail("bomb_capacity out of range");
  if (num_rigid < 0 || num_wood < 0) fail("wall counts must be non-negative");
  if (!(powerup_ratio >= 0.0 && powerup_ratio <= 1.0)) fail("powerup_ratio must be in [0, 1]");
}

std::string GridConfig::describe() const {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "height=%d width=%d players=%d step_limit=%d fuse=%d flame_life=%d blast=%d "
                "capacity=%d rigid=%d wood=%d powerup_ratio=%.17g",
                height, width, num_players, step_limit, fuse, flame_life, blast_strength,
                bomb_capacity, num_rigid, num_wood, powerup_ratio);
  return buf;
}

GridConfig GridConfig::parse(const std::string& description) {
  GridConfig c;
  std::istringstream in(description);
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ConfigError("grid config: expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    try {
      if (key == "powerup_ratio") {
        c.powerup_ratio = std::stod(value);
        continue;
      }
      const int v = std::stoi(value);
      if (key == "height") c.height = v;
      else if (key == "width") c.width = v;
      else if (key == "players") c.num_players = v;
      else if (key == "step_limit") c.step_limit = v;
      else if (key == "fuse") c.fuse = v;
      else if (key == "flame_life") c.flame_life = v;
      else if (key == "blast") c.blast_strength = v;
      else if (key == "capacity") c.bomb_capacity = v;
      else if (key == "rigid") c.num_rigid = v;
      else if (key == "wood") c.num_wood = v;
      else throw ConfigError("grid config: unknown key '" + key + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("grid config: bad value in '" + token + "'");
    }
  }
  c.validate();
  return c;
}

std::vector<Position> spawn_positions(const GridConfig& config) {
  const int h = config.height;
  const int w = config.width;
  if (config.num_players == 2) return {{1, 1}, {h - 2, w - 2}};
  return {{1, 1}, {h - 2, 1}, {h - 2, w - 2}, {1, w - 2}};
}

GridState::GridState(const GridConfig& config) : config_(config) {
  config_.validate();
  tiles_.fill(Tile::kPassage);
  hidden_.fill(Tile::kPassage);
  for (int p = 0; p < config_.num_players; ++p) {
    Agent& a = agents_[static_cast<std::size_t>(p)];
    a.capacity = static_cast<std::uint8_t>(config_.bomb_capacity);
    a.strength = static_cast<std::uint8_t>(config_.blast_strength);
  }
}

namespace {

// Every spawn corner reachable from the first one through non-rigid tiles.
bool corners_connected(const GridState& s, const std::vector<Position>& corners) {
  std::vector<char> seen(static_cast<std::size_t>(s.height() * s.width()), 0);
  std::deque<Position> queue{corners.front()};
  seen[static_cast<std::size_t>(s.cell(corners.front()))] = 1;
  while (!queue.empty()) {
    const Position p = queue.front();
    queue.pop_front();
    for (Move m : {Move::kUp, Move::kDown, Move::kLeft, Move::kRight}) {
      const Position n = moved(p, m);
      if (!s.in_bounds(n) || s.tile(n) == Tile::kRigid) continue;
      auto& flag = seen[static_cast<std::size_t>(s.cell(n))];
      if (flag) continue;
      flag = 1;
      queue.push_back(n);
    }
  }
  return std::all_of(corners.begin(), corners.end(),
                     [&](Position c) { return seen[static_cast<std::size_t>(s.cell(c))] != 0; });
}

}  // namespace

GridState GridState::generate(const GridConfig& config, std::uint64_t seed) {
  Rng rng = make_rng(seed, {0x6272640A});
  const int h = config.height;
  const int w = config.width;
  const int qh = (h + 1) / 2;
  const int qw = (w + 1) / 2;
  const std::vector<Position> corners = spawn_positions(GridConfig{.height = h, .width = w});

  // Walls are drawn in the top-left quadrant and mirrored to the other three.
  std::vector<Position> candidates;
  for (int r = 0; r < qh; ++r) {
    for (int c = 0; c < qw; ++c) {
      const bool reserved = (r == 1 && c == 1) || (r == 1 && c == 2) || (r == 2 && c == 1);
      if (!reserved) candidates.push_back({r, c});
    }
  }
  const int rigid = std::min<int>(static_cast<int>(std::lround(config.num_rigid / 4.0)),
                                  static_cast<int>(candidates.size()));
  const int wood = std::min<int>(static_cast<int>(std::lround(config.num_wood / 4.0)),
                                 static_cast<int>(candidates.size()) - rigid);

  for (;;) {
    GridState s(config);
    std::shuffle(candidates.begin(), candidates.end(), rng);
    auto place = [&](Position p, Tile t) {
      for (Position m : {p, Position{h - 1 - p.row, p.col}, Position{p.row, w - 1 - p.col},
                         Position{h - 1 - p.row, w - 1 - p.col}}) {
        s.set_tile(m, t);
      }
    };
    for (int i = 0; i < rigid; ++i) place(candidates[static_cast<std::size_t>(i)], Tile::kRigid);
    for (int i = rigid; i < rigid + wood; ++i) place(candidates[static_cast<std::size_t>(i)], Tile::kWood);
    if (!corners_connected(s, corners)) continue;

    std::vector<Position> woods;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        if (s.tile({r, c}) == Tile::kWood) woods.push_back({r, c});
      }
    }
    std::shuffle(woods.begin(), woods.end(), rng);
    const auto items = static_cast<std::size_t>(std::lround(config.powerup_ratio * woods.size()));
    for (std::size_t i = 0; i < items; ++i) {
      s.set_hidden(woods[i], uniform_index(rng, 2) == 0 ? Tile::kExtraBomb : Tile::kBlastRange);
    }

    const std::vector<Position> spawns = spawn_positions(config);
    for (int p = 0; p < config.num_players; ++p) {
      s.agents_[static_cast<std::size_t>(p)].pos = spawns[static_cast<std::size_t>(p)];
    }
    return s;
  }
}

GridState GridState::from_layout(const GridConfig& config, const std::vector<std::string>& rows) {
  GridConfig c = config;
  c.height = static_cast<int>(rows.size());
  c.width = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  GridState s(c);
  for (int p = 0; p < c.num_players; ++p) {
    s.agents_[static_cast<std::size_t>(p)].alive = false;
    s.agents_[static_cast<std::size_t>(p)].pos = {0, 0};
  }
  for (int r = 0; r < c.height; ++r) {
    if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != c.width) {
      throw ConfigError("layout rows must have equal length");
    }
    for (int col = 0; col < c.width; ++col) {
      const char ch = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)];
      const Position p{r, col};
      switch (ch) {
        case '.':
          break;
        case '#':
          s.set_tile(p, Tile::kRigid);
          break;
        case 'w':
          s.set_tile(p, Tile::kWood);
          break;
        case 'e':
          s.set_tile(p, Tile::kExtraBomb);
          break;
        case 'r':
          s.set_tile(p, Tile::kBlastRange);
          break;
        default:
          if (ch >= '0' && ch < '0' + c.num_players) {
            Agent& a = s.agents_[static_cast<std::size_t>(ch - '0')];
            a.pos = p;
            a.alive = true;
          } else {
            throw ConfigError(std::string("unknown layout character '") + ch + "'");
          }
      }
    }
  }
  return s;
}

void GridState::add_bomb(const Bomb& bomb) {
  if (bombs_.size() >= static_cast<std::size_t>(kMaxBombs)) throw ContractError("too many bombs");
  bombs_.push_back(bomb);
  agents_[bomb.owner].bombs_in_play += 1;
}

const Bomb* GridState::bomb_at(Position p) const {
  for (const Bomb& b : bombs_) {
    if (b.pos == p) return &b;
  }
  return nullptr;
}

int GridState::alive_count() const {
  int n = 0;
  for (int p = 0; p < config_.num_players; ++p) n += agents_[static_cast<std::size_t>(p)].alive ? 1 : 0;
  return n;
}

bool GridState::is_terminal() const { return alive_count() <= 1 || step_ >= config_.step_limit; }

bool GridState::walkable(Position p) const {
  if (!in_bounds(p)) return false;
  const Tile t = tile(p);
  return t != Tile::kRigid && t != Tile::kWood && bomb_at(p) == nullptr;
}

void GridState::trace_blast(const Bomb& bomb, CellMask& out) const {
  out.set(static_cast<std::size_t>(cell(bomb.pos)));
  for (Move m : {Move::kUp, Move::kDown, Move::kLeft, Move::kRight}) {
    Position p = bomb.pos;
    for (int i = 1; i < bomb.strength; ++i) {
      p = moved(p, m);
      if (!in_bounds(p)) break;
      const Tile t = tile(p);
      if (t == Tile::kRigid) break;
      out.set(static_cast<std::size_t>(cell(p)));
      if (t == Tile::kWood) break;
    }
  }
}

CellMask GridState::blast_footprint(const Bomb& bomb) const {
  CellMask out;
  trace_blast(bomb, out);
  return out;
}

GridState::Explosion GridState::resolve_explosions(std::bitset<kMaxBombs> initial) const {
  Explosion ex;
  if (initial.none()) return ex;
  boost::container::static_vector<int, kMaxBombs> queue;
  for (std::size_t i = 0; i < bombs_.size(); ++i) {
    if (initial.test(i)) {
      ex.exploded.set(i);
      queue.push_back(static_cast<int>(i));
    }
  }
  // Blasts are traced on the walls as they were at the start of the tick, so
  // every bomb exploding in the same tick sees the same board.
  for (std::size_t head = 0; head < queue.size(); ++head) {
    CellMask blast;
    trace_blast(bombs_[static_cast<std::size_t>(queue[head])], blast);
    ex.flames |= blast;
    for (std::size_t j = 0; j < bombs_.size(); ++j) {
      if (!ex.exploded.test(j) && blast.test(static_cast<std::size_t>(cell(bombs_[j].pos)))) {
        ex.exploded.set(j);
        queue.push_back(static_cast<int>(j));
      }
    }
  }
  return ex;
}

CellMask GridState::next_tick_flames() const {
  std::bitset<kMaxBombs> initial;
  for (std::size_t i = 0; i < bombs_.size(); ++i) {
    if (bombs_[i].fuse <= 1) initial.set(i);
  }
  CellMask danger = resolve_explosions(initial).flames;
  const int cells = config_.height * config_.width;
  for (int c = 0; c < cells; ++c) {
    if (flames_[static_cast<std::size_t>(c)] > 0) danger.set(static_cast<std::size_t>(c));
  }
  return danger;
}

namespace {

ActionList masked_with(const GridState& s, PlayerId player, const CellMask& danger) {
  const Agent& a = s.agent(player);
  ActionList safe;
  auto consider = [&](Move m, Position dest) {
    if (!danger.test(static_cast<std::size_t>(s.cell(dest)))) safe.push_back(to_action(m));
  };
  consider(Move::kStop, a.pos);
  for (Move m : {Move::kUp, Move::kDown, Move::kLeft, Move::kRight}) {
    const Position dest = moved(a.pos, m);
    if (s.walkable(dest)) consider(m, dest);
  }
  if (a.bombs_in_play < a.capacity && s.bomb_at(a.pos) == nullptr) consider(Move::kBomb, a.pos);
  if (safe.empty()) safe.push_back(to_action(Move::kStop));
  return safe;
}

}  // namespace

ActionList GridState::masked_actions(PlayerId p) const {
  if (p.index < 0 || p.index >= config_.num_players) throw ContractError("unknown " + to_string(p));
  if (is_terminal()) throw ContractError("legal actions queried on a terminal grid state");
  if (!agent(p).alive) throw ContractError("masked actions queried for dead " + to_string(p));
  return masked_with(*this, p, next_tick_flames());
}

GridState GridState::step(const JointAction& joint) const {
  if (is_terminal()) throw ContractError("step called on a terminal grid state");
  if (joint.size() != config_.num_players) {
    throw ContractError("joint action has " + std::to_string(joint.size()) + " slots, expected " +
                        std::to_string(config_.num_players));
  }
  const int n = config_.num_players;
  {
    const CellMask danger = next_tick_flames();
    for (int p = 0; p < n; ++p) {
      if (!agents_[static_cast<std::size_t>(p)].alive) continue;
      const ActionList legal = masked_with(*this, PlayerId{p}, danger);
      if (std::find(legal.begin(), legal.end(), joint[p]) == legal.end()) {
        throw ContractError("illegal action " + std::to_string(joint[p].id) + " for " +
                            to_string(PlayerId{p}));
      }
    }
  }

  GridState next = *this;

  // Fuses, explosions and flames.
  std::bitset<kMaxBombs> initial;
  for (std::size_t i = 0; i < next.bombs_.size(); ++i) {
    next.bombs_[i].fuse -= 1;
    if (next.bombs_[i].fuse == 0) initial.set(i);
  }
  const Explosion ex = next.resolve_explosions(initial);
  if (ex.flames.any()) {
    const int cells = config_.height * config_.width;
    for (int c = 0; c < cells; ++c) {
      if (!ex.flames.test(static_cast<std::size_t>(c))) continue;
      auto& t = next.tiles_[static_cast<std::size_t>(c)];
      if (t == Tile::kWood) {
        t = next.hidden_[static_cast<std::size_t>(c)];
        next.hidden_[static_cast<std::size_t>(c)] = Tile::kPassage;
      } else if (is_powerup(t)) {
        t = Tile::kPassage;
      }
      next.flames_[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(config_.flame_life);
    }
    boost::container::static_vector<Bomb, kMaxBombs> remaining;
    for (std::size_t i = 0; i < next.bombs_.size(); ++i) {
      if (ex.exploded.test(i)) {
        next.agents_[next.bombs_[i].owner].bombs_in_play -= 1;
      } else {
        remaining.push_back(next.bombs_[i]);
      }
    }
    next.bombs_ = remaining;
  }

  // Bombs are laid on the agent's tile before anyone moves.
  for (int p = 0; p < n; ++p) {
    Agent& a = next.agents_[static_cast<std::size_t>(p)];
    if (a.alive && to_move(joint[p]) == Move::kBomb) {
      next.bombs_.push_back(Bomb{a.pos, static_cast<std::uint8_t>(p),
                                 static_cast<std::uint8_t>(config_.fuse), a.strength});
      a.bombs_in_play += 1;
    }
  }

  // Simultaneous moves: agents contesting a tile, swapping, or walking into a
  // standing agent bounce back; repeat until no conflicts remain.
  std::array<Position, kMaxPlayers> origin{};
  std::array<Position, kMaxPlayers> target{};
  for (int p = 0; p < n; ++p) {
    const Agent& a = next.agents_[static_cast<std::size_t>(p)];
    origin[static_cast<std::size_t>(p)] = a.pos;
    target[static_cast<std::size_t>(p)] = a.alive ? moved(a.pos, to_move(joint[p])) : a.pos;
  }
  for (bool changed = true; changed;) {
    changed = false;
    std::array<bool, kMaxPlayers> bounce{};
    for (int p = 0; p < n; ++p) {
      const auto up = static_cast<std::size_t>(p);
      if (!next.agents_[up].alive || target[up] == origin[up]) continue;
      for (int q = 0; q < n; ++q) {
        const auto uq = static_cast<std::size_t>(q);
        if (q == p || !next.agents_[uq].alive) continue;
        if (target[up] == target[uq] || (target[up] == origin[uq] && target[uq] == origin[up])) {
          bounce[up] = true;
        }
      }
    }
    for (int p = 0; p < n; ++p) {
      const auto up = static_cast<std::size_t>(p);
      if (bounce[up]) {
        target[up] = origin[up];
        changed = true;
      }
    }
  }
  for (int p = 0; p < n; ++p) next.agents_[static_cast<std::size_t>(p)].pos = target[static_cast<std::size_t>(p)];

  // Flame deaths, then power-up collection.
  for (int p = 0; p < n; ++p) {
    Agent& a = next.agents_[static_cast<std::size_t>(p)];
    if (a.alive && next.flames_[static_cast<std::size_t>(next.cell(a.pos))] > 0) a.alive = false;
  }
  for (int p = 0; p < n; ++p) {
    Agent& a = next.agents_[static_cast<std::size_t>(p)];
    if (!a.alive) continue;
    auto& t = next.tiles_[static_cast<std::size_t>(next.cell(a.pos))];
    if (t == Tile::kExtraBomb) {
      if (a.capacity < kMaxCapacity) a.capacity += 1;
      t = Tile::kPassage;
    } else if (t == Tile::kBlastRange) {
      if (a.strength < std::max(config_.height, config_.width)) a.strength += 1;
      t = Tile::kPassage;
    }
  }

  const int cells = config_.height * config_.width;
  for (int c = 0; c < cells; ++c) {
    auto& f = next.flames_[static_cast<std::size_t>(c)];
    if (f > 0) f -= 1;
  }
  next.step_ += 1;
  return next;
}

int GridState::terminal_reward(PlayerId p) const {
  if (!is_terminal()) throw ContractError("terminal_reward queried on a non-terminal grid state");
  const bool alive = agent(p).alive;
  if (alive_count() == 1) return alive ? 1 : -1;
  // Step limit with several survivors: survivors draw. Nobody alive: all lose.
  return alive ? 0 : -1;
}

double GridState::heuristic_value(PlayerId p) const {
  if (is_terminal()) return terminal_reward(p);
  return agent(p).alive ? 0.0 : -1.0;
}

std::string GridState::serialize() const {
  const int cells = config_.height * config_.width;
  std::string out;
  out.reserve(static_cast<std::size_t>(8 + 3 * cells + 5 * bombs_.size() + 6 * kMaxPlayers));
  out.push_back(static_cast<char>(config_.height));
  out.push_back(static_cast<char>(config_.width));
  out.push_back(static_cast<char>(step_ & 0xFF));
  out.push_back(static_cast<char>((step_ >> 8) & 0xFF));
  out.append(reinterpret_cast<const char*>(tiles_.data()), static_cast<std::size_t>(cells));
  out.append(reinterpret_cast<const char*>(hidden_.data()), static_cast<std::size_t>(cells));
  out.append(reinterpret_cast<const char*>(flames_.data()), static_cast<std::size_t>(cells));
  boost::container::static_vector<Bomb, kMaxBombs> sorted = bombs_;
  std::sort(sorted.begin(), sorted.end(),
            [this](const Bomb& a, const Bomb& b) { return cell(a.pos) < cell(b.pos); });
  for (const Bomb& b : sorted) {
    out.push_back(static_cast<char>(cell(b.pos)));
    out.push_back(static_cast<char>(b.owner));
    out.push_back(static_cast<char>(b.fuse));
    out.push_back(static_cast<char>(b.strength));
  }
  out.push_back(static_cast<char>(0xFF));
  for (int p = 0; p < config_.num_players; ++p) {
    const Agent& a = agents_[static_cast<std::size_t>(p)];
    if (a.alive) {
      out.push_back(static_cast<char>(cell(a.pos)));
      out.push_back(static_cast<char>(a.capacity));
      out.push_back(static_cast<char>(a.strength));
      out.push_back(static_cast<char>(a.bombs_in_play));
    } else {
      // Only the bombs a dead agent left behind matter, and those are above.
      out.push_back(static_cast<char>(0xFE));
    }
  }
  return out;
}

StateKey GridState::canonical_key() const { return StateKey{hash_bytes(serialize(), 0x47524944)}; }

std::string render(const GridState& s) {
  std::string out;
  for (int r = 0; r < s.height(); ++r) {
    for (int c = 0; c < s.width(); ++c) {
      const Position p{r, c};
      char ch = '.';
      switch (s.tile(p)) {
        case Tile::kRigid:
          ch = '#';
          break;
        case Tile::kWood:
          ch = 'w';
          break;
        case Tile::kExtraBomb:
          ch = 'e';
          break;
        case Tile::kBlastRange:
          ch = 'r';
          break;
        default:
          break;
      }
      if (s.flame(p) > 0) ch = '*';
      if (s.bomb_at(p) != nullptr) ch = 'B';
      for (int a = 0; a < s.num_players(); ++a) {
        const Agent& agent = s.agent(PlayerId{a});
        if (agent.alive && agent.pos == p) ch = static_cast<char>('0' + a);
      }
      out.push_back(ch);
    }
    out.push_back('\n');
  }
  return out;
}

namespace {

constexpr const char* kReplayHeader = "simulplan-replay 1";

std::string hex(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string write_replay(const Replay& replay) {
  std::ostringstream out;
  out << kReplayHeader << '\n';
  out << "config " << replay.config.describe() << '\n';
  out << "seed " << replay.seed << '\n';
  for (const JointAction& joint : replay.steps) {
    out << "step";
    for (int p = 0; p < joint.size(); ++p) out << ' ' << static_cast<int>(joint[p].id);
    out << '\n';
  }
  Replay unchecked = replay;
  unchecked.final_key.reset();
  out << "end " << hex(play_replay(unchecked).canonical_key().hash) << '\n';
  return out.str();
}

Replay read_replay(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kReplayHeader) throw ConfigError("not a simulplan replay");
  Replay replay;
  bool have_config = false;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string tag;
    fields >> tag;
    if (tag == "config") {
      std::string rest;
      std::getline(fields, rest);
      replay.config = GridConfig::parse(rest);
      have_config = true;
    } else if (tag == "seed") {
      if (!(fields >> replay.seed)) throw ConfigError("replay line " + std::to_string(line_no) + ": bad seed");
    } else if (tag == "step") {
      if (!have_config) throw ConfigError("replay: step before config");
      JointAction joint(replay.config.num_players);
      for (int p = 0; p < replay.config.num_players; ++p) {
        int id = -1;
        if (!(fields >> id) || id < 0 || id >= kNumMoves) {
          throw ConfigError("replay line " + std::to_string(line_no) + ": bad action");
        }
        joint[p] = Action{static_cast<std::uint8_t>(id)};
      }
      replay.steps.push_back(joint);
    } else if (tag == "end") {
      std::string key;
      fields >> key;
      try {
        replay.final_key = std::stoull(key, nullptr, 16);
      } catch (const std::logic_error&) {
        throw ConfigError("replay line " + std::to_string(line_no) + ": bad final key");
      }
    } else {
      throw ConfigError("replay line " + std::to_string(line_no) + ": unknown record '" + tag + "'");
    }
  }
  if (!have_config) throw ConfigError("replay has no config line");
  return replay;
}

GridState play_replay(const Replay& replay) {
  GridState s = GridState::generate(replay.config, replay.seed);
  for (const JointAction& joint : replay.steps) s = s.step(joint);
  if (replay.final_key && *replay.final_key != s.canonical_key().hash) {
    throw ContractError("replay diverged: final key mismatch");
  }
  return s;
}

}  // namespace simulplan::grid
