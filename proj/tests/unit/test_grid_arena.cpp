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

#include <gtest/gtest.h>

#include <deque>

#include "simulplan/grid_arena.hpp"
#include "test_util.hpp"

namespace simulplan::grid {
namespace {

using simulplan::testing::has_action;
using simulplan::testing::joint_of;
using simulplan::testing::random_joint;
using simulplan::testing::random_playout;

constexpr Move S = Move::kStop;
constexpr Move U = Move::kUp;
constexpr Move D = Move::kDown;
constexpr Move L = Move::kLeft;
constexpr Move R = Move::kRight;
constexpr Move B = Move::kBomb;

const std::vector<std::string> kOpen7{
    ".......",  //
    ".0.....",  //
    ".......",  //
    ".......",  //
    ".......",  //
    ".....1.",  //
    ".......",
};

GridConfig two_players() { return GridConfig::duel(100); }

// Independent reachability oracle: BFS over tiles that are not rigid.
bool reachable(const GridState& s, Position from, Position to) {
  std::vector<char> seen(static_cast<std::size_t>(s.height() * s.width()), 0);
  std::deque<Position> q{from};
  seen[static_cast<std::size_t>(s.cell(from))] = 1;
  while (!q.empty()) {
    const Position p = q.front();
    q.pop_front();
    if (p == to) return true;
    const Position next[4] = {{p.row - 1, p.col}, {p.row + 1, p.col}, {p.row, p.col - 1}, {p.row, p.col + 1}};
    for (Position n : next) {
      if (!s.in_bounds(n) || s.tile(n) == Tile::kRigid || seen[static_cast<std::size_t>(s.cell(n))]) continue;
      seen[static_cast<std::size_t>(s.cell(n))] = 1;
      q.push_back(n);
    }
  }
  return false;
}

TEST(Generate, SameSeedSameBoard) {
  const GridState a = GridState::generate(GridConfig::ffa(), 17);
  const GridState b = GridState::generate(GridConfig::ffa(), 17);
  EXPECT_EQ(a.canonical_key(), b.canonical_key());
  EXPECT_EQ(a.serialize(), b.serialize());
  EXPECT_NE(a.canonical_key(), GridState::generate(GridConfig::ffa(), 18).canonical_key());
}

TEST(Generate, FourAliveAgentsInCorners) {
  const GridState s = GridState::generate(GridConfig::ffa(), 1);
  const auto spawns = spawn_positions(GridConfig::ffa());
  for (int p = 0; p < 4; ++p) {
    EXPECT_TRUE(s.agent(PlayerId{p}).alive);
    EXPECT_EQ(s.agent(PlayerId{p}).pos, spawns[static_cast<std::size_t>(p)]);
    EXPECT_EQ(s.tile(spawns[static_cast<std::size_t>(p)]), Tile::kPassage);
    EXPECT_EQ(s.agent(PlayerId{p}).capacity, 1);
    EXPECT_EQ(s.agent(PlayerId{p}).strength, 2);
  }
  EXPECT_EQ(s.step_count(), 0);
  EXPECT_TRUE(s.bombs().empty());
}

TEST(Generate, ThousandSeedsAreSymmetricAndConnected) {
  const GridConfig cfg = GridConfig::ffa();
  const auto spawns = spawn_positions(cfg);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const GridState s = GridState::generate(cfg, seed);
    for (int r = 0; r < s.height(); ++r) {
      for (int c = 0; c < s.width(); ++c) {
        const Tile t = s.tile({r, c});
        ASSERT_EQ(t, s.tile({s.height() - 1 - r, c})) << "seed " << seed;
        ASSERT_EQ(t, s.tile({r, s.width() - 1 - c})) << "seed " << seed;
      }
    }
    for (Position a : spawns) {
      for (Position b : spawns) ASSERT_TRUE(reachable(s, a, b)) << "seed " << seed;
    }
  }
}

TEST(Generate, PowerupRatioWithinOneTile) {
  for (double ratio : {0.0, 0.3, 0.5, 1.0}) {
    GridConfig cfg = GridConfig::ffa();
    cfg.powerup_ratio = ratio;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const GridState s = GridState::generate(cfg, seed);
      int wood = 0;
      int items = 0;
      for (int r = 0; r < s.height(); ++r) {
        for (int c = 0; c < s.width(); ++c) {
          if (s.tile({r, c}) == Tile::kWood) ++wood;
          if (s.hidden({r, c}) != Tile::kPassage) {
            EXPECT_EQ(s.tile({r, c}), Tile::kWood);
            EXPECT_TRUE(is_powerup(s.hidden({r, c})));
            ++items;
          }
        }
      }
      EXPECT_GT(wood, 0);
      EXPECT_LE(std::abs(items - ratio * wood), 1.0) << "seed " << seed << " ratio " << ratio;
    }
  }
}

TEST(Generate, DuelUsesDiagonalCorners) {
  const GridState s = GridState::generate(GridConfig::duel(), 4);
  EXPECT_EQ(s.num_players(), 2);
  EXPECT_EQ(s.agent(PlayerId{0}).pos, (Position{1, 1}));
  EXPECT_EQ(s.agent(PlayerId{1}).pos, (Position{9, 9}));
}

TEST(Masking, OpenCenterAllowsEverything) {
  const GridState s = GridState::from_layout(two_players(), {
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                "...0...",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                "......1",
                                                            });
  EXPECT_EQ(s.masked_actions(PlayerId{0}).size(), 6u);
}

TEST(Masking, BoxedInWithoutAmmoOnlyStops) {
  GridState s = GridState::from_layout(two_players(), {
                                                          ".......",  //
                                                          "..#....",  //
                                                          ".#0w...",  //
                                                          "..#....",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          "......1",
                                                      });
  s.mutable_agent(PlayerId{0}).bombs_in_play = 1;
  const ActionList legal = s.masked_actions(PlayerId{0});
  ASSERT_EQ(legal.size(), 1u);
  EXPECT_EQ(legal[0], to_action(S));
}

TEST(Masking, FlameNeighbourIsMasked) {
  GridState s = GridState::from_layout(two_players(), kOpen7);
  s.set_flame({1, 2}, 2);
  const ActionList legal = s.masked_actions(PlayerId{0});
  EXPECT_FALSE(has_action(legal, R));
  EXPECT_TRUE(has_action(legal, L));
  EXPECT_TRUE(has_action(legal, S));
}

TEST(Masking, ExhaustedCapacityMasksBomb) {
  GridState s = GridState::from_layout(two_players(), kOpen7);
  s.add_bomb(Bomb{{3, 3}, 0, 8, 2});
  ASSERT_EQ(s.agent(PlayerId{0}).bombs_in_play, 1);
  EXPECT_FALSE(has_action(s.masked_actions(PlayerId{0}), B));
  EXPECT_TRUE(has_action(s.masked_actions(PlayerId{1}), B));
}

TEST(Masking, WallsBombsAndEdgesAreMasked) {
  GridState s = GridState::from_layout(two_players(), {
                                                          "0w.....",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          "......1",
                                                      });
  s.add_bomb(Bomb{{1, 0}, 1, 8, 2});
  const ActionList legal = s.masked_actions(PlayerId{0});
  EXPECT_FALSE(has_action(legal, U));
  EXPECT_FALSE(has_action(legal, L));
  EXPECT_FALSE(has_action(legal, R));
  EXPECT_FALSE(has_action(legal, D));
  EXPECT_TRUE(has_action(legal, S));
  EXPECT_TRUE(has_action(legal, B));
}

TEST(Masking, ImminentBlastMasksDestinationsInside) {
  GridState s = GridState::from_layout(two_players(), kOpen7);
  s.add_bomb(Bomb{{3, 1}, 1, 1, 3});  // explodes next tick over column 1, rows 1..5
  const ActionList legal = s.masked_actions(PlayerId{0});
  EXPECT_FALSE(has_action(legal, S));
  EXPECT_FALSE(has_action(legal, B));
  EXPECT_FALSE(has_action(legal, D));
  EXPECT_TRUE(has_action(legal, L));
  EXPECT_TRUE(has_action(legal, R));
}

TEST(Masking, DeadPlayerAndTerminalStateAreErrors) {
  GridState s = GridState::from_layout(GridConfig::ffa(), {
                                                              ".......",  //
                                                              ".0.....",  //
                                                              ".......",  //
                                                              ".......",  //
                                                              ".......",  //
                                                              ".....1.",  //
                                                              ".......",
                                                          });
  EXPECT_THROW(s.masked_actions(PlayerId{2}), ContractError);
  EXPECT_FALSE(s.is_acting(PlayerId{3}));
  GridState done = GridState::from_layout(two_players(), {
                                                             ".....",  //
                                                             ".0...",  //
                                                             ".....",  //
                                                             ".....",  //
                                                             ".....",
                                                         });
  ASSERT_TRUE(done.is_terminal());
  EXPECT_THROW(done.masked_actions(PlayerId{0}), ContractError);
  EXPECT_THROW(done.step(JointAction(2)), ContractError);
}

TEST(Step, AllStopOnQuietBoardOnlyAdvancesTime) {
  const GridState s = GridState::generate(GridConfig::ffa(), 5);
  const GridState n = s.step(joint_of({S, S, S, S}));
  EXPECT_EQ(n.step_count(), s.step_count() + 1);
  GridState rewound = n;
  rewound.set_step_count(s.step_count());
  EXPECT_EQ(rewound.serialize(), s.serialize());
}

TEST(Step, IllegalActionNamesThePlayer) {
  const GridState s = GridState::from_layout(two_players(), {
                                                                "0#.....",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                "......1",
                                                            });
  try {
    (void)s.step(joint_of({R, S}));
    FAIL() << "expected ContractError";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("player 0"), std::string::npos);
  }
}

TEST(Step, BlastShapeOnOpenBoard) {
  GridState s = GridState::from_layout(two_players(), {
                                                          "0..........",  //
                                                          "...........",  //
                                                          "...........",  //
                                                          "...........",  //
                                                          "...........",  //
                                                          "...........",  //
                                                          "...........",  //
                                                          "...........",  //
                                                          "...........",  //
                                                          "...........",  //
                                                          "..........1",
                                                      });
  s.add_bomb(Bomb{{5, 5}, 0, 1, 2});
  const GridState n = s.step(joint_of({S, S}));
  const std::vector<Position> expect{{5, 5}, {4, 5}, {6, 5}, {5, 4}, {5, 6}};
  int flames = 0;
  for (int r = 0; r < n.height(); ++r) {
    for (int c = 0; c < n.width(); ++c) {
      const bool in = std::find(expect.begin(), expect.end(), Position{r, c}) != expect.end();
      EXPECT_EQ(n.flame({r, c}) > 0, in) << r << "," << c;
      flames += n.flame({r, c}) > 0 ? 1 : 0;
    }
  }
  EXPECT_EQ(flames, 5);
  EXPECT_TRUE(n.bombs().empty());
  EXPECT_EQ(n.agent(PlayerId{0}).bombs_in_play, 0);
}

TEST(Step, RigidStopsBlastWoodBreaksAndRevealsItem) {
  GridState s = GridState::from_layout(two_players(), {
                                                          "0......",  //
                                                          ".......",  //
                                                          "...#...",  //
                                                          ".w.....",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          "......1",
                                                      });
  s.set_hidden({3, 1}, Tile::kBlastRange);
  s.add_bomb(Bomb{{3, 3}, 0, 1, 4});
  const GridState n = s.step(joint_of({S, S}));
  EXPECT_EQ(n.flame({2, 3}), 0);  // rigid
  EXPECT_EQ(n.flame({1, 3}), 0);  // behind rigid
  EXPECT_GT(n.flame({3, 1}), 0);  // wood burns
  EXPECT_EQ(n.flame({3, 0}), 0);  // behind wood
  EXPECT_EQ(n.tile({3, 1}), Tile::kBlastRange);
  EXPECT_EQ(n.tile({2, 3}), Tile::kRigid);
  EXPECT_GT(n.flame({6, 3}), 0);
}

TEST(Step, BlastDestroysFloorPowerups) {
  GridState s = GridState::from_layout(two_players(), {
                                                          "0......",  //
                                                          ".......",  //
                                                          "...e...",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          "......1",
                                                      });
  s.add_bomb(Bomb{{3, 3}, 0, 1, 2});
  EXPECT_EQ(s.step(joint_of({S, S})).tile({2, 3}), Tile::kPassage);
}

TEST(Step, ChainReactionExplodesSameTick) {
  GridState s = GridState::from_layout(two_players(), {
                                                          "0......",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          "......1",
                                                      });
  s.add_bomb(Bomb{{3, 1}, 0, 1, 3});
  s.add_bomb(Bomb{{3, 3}, 1, 9, 2});
  const GridState n = s.step(joint_of({S, S}));
  EXPECT_TRUE(n.bombs().empty());
  EXPECT_GT(n.flame({3, 4}), 0);  // only bomb B reaches here
  EXPECT_GT(n.flame({2, 3}), 0);
  EXPECT_EQ(n.agent(PlayerId{1}).bombs_in_play, 0);
}

TEST(Step, SwapBouncesBoth) {
  const GridState s = GridState::from_layout(two_players(), {
                                                                ".......",  //
                                                                ".01....",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",
                                                            });
  const GridState n = s.step(joint_of({R, L}));
  EXPECT_EQ(n.agent(PlayerId{0}).pos, (Position{1, 1}));
  EXPECT_EQ(n.agent(PlayerId{1}).pos, (Position{1, 2}));
}

TEST(Step, ContestedTileBouncesBoth) {
  const GridState s = GridState::from_layout(two_players(), {
                                                                ".......",  //
                                                                ".0.1...",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",
                                                            });
  const GridState n = s.step(joint_of({R, L}));
  EXPECT_EQ(n.agent(PlayerId{0}).pos, (Position{1, 1}));
  EXPECT_EQ(n.agent(PlayerId{1}).pos, (Position{1, 3}));
}

TEST(Step, FollowingIntoVacatedTileSucceeds) {
  const GridState s = GridState::from_layout(two_players(), {
                                                                ".......",  //
                                                                ".01....",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",
                                                            });
  const GridState n = s.step(joint_of({R, R}));
  EXPECT_EQ(n.agent(PlayerId{0}).pos, (Position{1, 2}));
  EXPECT_EQ(n.agent(PlayerId{1}).pos, (Position{1, 3}));
}

TEST(Step, WalkingIntoStandingAgentBounces) {
  const GridState s = GridState::from_layout(two_players(), {
                                                                ".......",  //
                                                                ".01....",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",  //
                                                                ".......",
                                                            });
  const GridState n = s.step(joint_of({R, S}));
  EXPECT_EQ(n.agent(PlayerId{0}).pos, (Position{1, 1}));
}

TEST(Step, BombIsLaidUnderTheAgentBeforeItMoves) {
  const GridState s = GridState::from_layout(two_players(), kOpen7);
  const GridState n = s.step(joint_of({B, S}));
  ASSERT_EQ(n.bombs().size(), 1u);
  EXPECT_EQ(n.bombs()[0].pos, (Position{1, 1}));
  EXPECT_EQ(n.bombs()[0].fuse, 9);
  EXPECT_EQ(n.bombs()[0].strength, 2);
  EXPECT_EQ(n.agent(PlayerId{0}).bombs_in_play, 1);
  const GridState m = n.step(joint_of({R, S}));
  EXPECT_EQ(m.agent(PlayerId{0}).pos, (Position{1, 2}));
  EXPECT_EQ(m.bombs()[0].fuse, 8);
}

TEST(Step, FlameKillsAndPowerupsAreCollected) {
  GridState s = GridState::from_layout(two_players(), {
                                                          ".......",  //
                                                          ".0e....",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          ".....1r",  //
                                                          ".......",
                                                      });
  const GridState n = s.step(joint_of({R, R}));
  EXPECT_EQ(n.agent(PlayerId{0}).capacity, 2);
  EXPECT_EQ(n.agent(PlayerId{1}).strength, 3);
  EXPECT_EQ(n.tile({1, 2}), Tile::kPassage);
  EXPECT_EQ(n.tile({5, 6}), Tile::kPassage);

  // Player 1 is walled in next to a bomb about to go off: Stop is forced.
  GridState burn = GridState::from_layout(two_players(), {
                                                             ".......",  //
                                                             ".0.....",  //
                                                             ".......",  //
                                                             ".......",  //
                                                             ".....#.",  //
                                                             ".....1#",  //
                                                             ".....#.",
                                                         });
  burn.add_bomb(Bomb{{5, 4}, 0, 1, 2});
  ASSERT_EQ(burn.masked_actions(PlayerId{1}).size(), 1u);
  const GridState after = burn.step(joint_of({S, S}));
  EXPECT_FALSE(after.agent(PlayerId{1}).alive);
  EXPECT_TRUE(after.is_terminal());
  EXPECT_EQ(after.terminal_reward(PlayerId{0}), 1);
  EXPECT_EQ(after.terminal_reward(PlayerId{1}), -1);
}

TEST(Step, FusesAndFlamesCountDown) {
  GridState s = GridState::from_layout(two_players(), kOpen7);
  s.add_bomb(Bomb{{3, 3}, 0, 3, 1});
  s.set_flame({0, 6}, 2);
  GridState n = s.step(joint_of({S, S}));
  EXPECT_EQ(n.bombs()[0].fuse, 2);
  EXPECT_EQ(n.flame({0, 6}), 1);
  n = n.step(joint_of({S, S}));
  EXPECT_EQ(n.bombs()[0].fuse, 1);
  EXPECT_EQ(n.flame({0, 6}), 0);
}

TEST(Rewards, SoleSurvivorWins) {
  GridState s = GridState::generate(GridConfig::ffa(), 2);
  for (int p = 1; p < 4; ++p) s.mutable_agent(PlayerId{p}).alive = false;
  ASSERT_TRUE(s.is_terminal());
  EXPECT_EQ(s.terminal_reward(PlayerId{0}), 1);
  for (int p = 1; p < 4; ++p) EXPECT_EQ(s.terminal_reward(PlayerId{p}), -1);
}

TEST(Rewards, StepLimitSurvivorsDraw) {
  GridConfig cfg = GridConfig::ffa();
  cfg.step_limit = 3;
  GridState s = GridState::generate(cfg, 2);
  s.mutable_agent(PlayerId{3}).alive = false;
  for (int t = 0; t < 3; ++t) {
    EXPECT_THROW(s.terminal_reward(PlayerId{0}), ContractError);
    s = s.step(joint_of({S, S, S, S}));
  }
  ASSERT_TRUE(s.is_terminal());
  EXPECT_EQ(s.terminal_reward(PlayerId{0}), 0);
  EXPECT_EQ(s.terminal_reward(PlayerId{1}), 0);
  EXPECT_EQ(s.terminal_reward(PlayerId{2}), 0);
  EXPECT_EQ(s.terminal_reward(PlayerId{3}), -1);
}

TEST(Rewards, EveryoneDeadLoses) {
  GridState s = GridState::generate(GridConfig::duel(), 2);
  s.mutable_agent(PlayerId{0}).alive = false;
  s.mutable_agent(PlayerId{1}).alive = false;
  EXPECT_EQ(s.terminal_reward(PlayerId{0}), -1);
  EXPECT_EQ(s.terminal_reward(PlayerId{1}), -1);
}

TEST(Heuristic, ValueOfDeadAndAlive) {
  GridState s = GridState::generate(GridConfig::ffa(), 2);
  for (int p = 0; p < 4; ++p) EXPECT_EQ(s.heuristic_value(PlayerId{p}), 0.0);
  s.mutable_agent(PlayerId{2}).alive = false;
  s.mutable_agent(PlayerId{3}).alive = false;
  EXPECT_EQ(s.heuristic_value(PlayerId{0}), 0.0);
  EXPECT_EQ(s.heuristic_value(PlayerId{2}), -1.0);
}

// Deaths of agents playing masked actions only happen when every option was
// fatal or when a simultaneous-move bounce sent them back to a burning tile.
TEST(Properties, MaskingPreventsOneStepSuicide) {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    Rng rng(seed);
    GridState s = GridState::generate(GridConfig::ffa(), seed);
    while (!s.is_terminal()) {
      const CellMask danger = s.next_tick_flames();
      const JointAction j = random_joint(s, rng);
      const GridState n = s.step(j);
      for (int p = 0; p < 4; ++p) {
        const Agent& before = s.agent(PlayerId{p});
        if (!before.alive) continue;
        ++checked;
        if (n.agent(PlayerId{p}).alive) continue;
        const Position dest = moved(before.pos, to_move(j[p]));
        const bool bounced = n.agent(PlayerId{p}).pos != dest;
        bool any_safe = danger.test(static_cast<std::size_t>(s.cell(before.pos))) == false;
        for (Move m : {U, D, L, R}) {
          const Position q = moved(before.pos, m);
          any_safe |= s.walkable(q) && !danger.test(static_cast<std::size_t>(s.cell(q)));
        }
        EXPECT_TRUE(bounced || !any_safe) << "seed " << seed << " step " << s.step_count() << " player " << p;
      }
      s = n;
    }
  }
  EXPECT_GT(checked, 10000);
}

TEST(Properties, AliveCountNeverIncreasesAndFlamesFollowBlasts) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed + 1000);
    GridState s = GridState::generate(GridConfig::ffa(), seed);
    while (!s.is_terminal()) {
      const GridState n = s.step(random_joint(s, rng));
      EXPECT_LE(n.alive_count(), s.alive_count());
      CellMask allowed;
      for (const Bomb& b : s.bombs()) {
        const Bomb* still = n.bomb_at(b.pos);
        if (still == nullptr || still->owner != b.owner || still->fuse != b.fuse - 1) {
          allowed |= s.blast_footprint(b);
        }
      }
      for (int c = 0; c < n.height() * n.width(); ++c) {
        const Position p = n.position_of(c);
        if (n.flame(p) == s.config().flame_life - 1 && s.flame(p) != s.config().flame_life) {
          EXPECT_TRUE(allowed.test(static_cast<std::size_t>(c))) << "seed " << seed;
        }
      }
      for (const Bomb& b : n.bombs()) {
        const Bomb* old = s.bomb_at(b.pos);
        if (old != nullptr && old->owner == b.owner) EXPECT_EQ(b.fuse, old->fuse - 1);
        EXPECT_LE(n.agent(PlayerId{b.owner}).bombs_in_play, n.agent(PlayerId{b.owner}).capacity);
      }
      s = n;
    }
  }
}

TEST(Config, DescribeParsesBack) {
  GridConfig c = GridConfig::duel(321);
  c.powerup_ratio = 0.3;
  c.fuse = 7;
  EXPECT_EQ(GridConfig::parse(c.describe()), c);
  EXPECT_THROW(GridConfig::parse("height=3"), ConfigError);
  EXPECT_THROW(GridConfig::parse("colour=blue"), ConfigError);
  EXPECT_THROW(GridConfig::parse("fuse=abc"), ConfigError);
}

TEST(Replay, RoundTripAndFidelity) {
  Replay rec;
  rec.config = GridConfig::ffa_fast();
  rec.seed = 77;
  GridState s = GridState::generate(rec.config, rec.seed);
  Rng rng(3);
  while (!s.is_terminal()) {
    const JointAction j = random_joint(s, rng);
    rec.steps.push_back(j);
    s = s.step(j);
  }
  rec.final_key = s.canonical_key().hash;
  const Replay back = read_replay(write_replay(rec));
  EXPECT_EQ(back.config, rec.config);
  EXPECT_EQ(back.seed, rec.seed);
  ASSERT_EQ(back.steps.size(), rec.steps.size());
  EXPECT_EQ(play_replay(back).canonical_key(), s.canonical_key());

  Replay tampered = back;
  tampered.final_key = *back.final_key ^ 1;
  EXPECT_THROW(play_replay(tampered), ContractError);
}

TEST(Replay, MalformedFilesReportLine) {
  try {
    (void)read_replay("simulplan-replay 1\nconfig height=11\nseed 3\nstep 0 0 x 0\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
  }
  EXPECT_THROW(read_replay("garbage\n"), ConfigError);
}

TEST(Render, MatchesLayoutAlphabet) {
  GridState s = GridState::from_layout(two_players(), {
                                                          "0#w.e..",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          ".......",  //
                                                          "r.....1",
                                                      });
  s.add_bomb(Bomb{{3, 3}, 0, 5, 2});
  s.set_flame({4, 4}, 1);
  const std::string text = render(s);
  EXPECT_NE(text.find("0#w.e.."), std::string::npos);
  EXPECT_NE(text.find("...B..."), std::string::npos);
  EXPECT_NE(text.find("....*.."), std::string::npos);
  EXPECT_NE(text.find("r.....1"), std::string::npos);
}

TEST(Serialize, HiddenItemsAndTimeAreSignificant) {
  const GridState a = GridState::generate(GridConfig::ffa(), 9);
  GridState b = a;
  for (int r = 0; r < b.height(); ++r) {
    for (int c = 0; c < b.width(); ++c) {
      if (b.tile({r, c}) == Tile::kWood) {
        b.set_hidden({r, c}, b.hidden({r, c}) == Tile::kExtraBomb ? Tile::kBlastRange : Tile::kExtraBomb);
        r = b.height();
        break;
      }
    }
  }
  EXPECT_NE(a.canonical_key(), b.canonical_key());
  GridState c = a;
  c.set_step_count(1);
  EXPECT_NE(a.canonical_key(), c.canonical_key());
}

}  // namespace
}  // namespace simulplan::grid
