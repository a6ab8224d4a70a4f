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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include <nlohmann/json.hpp>
#include "simulplan/harness.hpp"

namespace simulplan::harness {
namespace {

MatchRecord record(int game, std::vector<int> slots, std::vector<Outcome> outcomes) {
  MatchRecord r;
  r.game = game;
  r.env = "test";
  r.seat_slot = std::move(slots);
  r.seat_outcome = std::move(outcomes);
  for (int s : r.seat_slot) r.seat_agent.push_back("agent" + std::to_string(s));
  return r;
}

TEST(Outcome, FromReward) {
  EXPECT_EQ(outcome_from_reward(1), Outcome::kWin);
  EXPECT_EQ(outcome_from_reward(0), Outcome::kDraw);
  EXPECT_EQ(outcome_from_reward(-1), Outcome::kLoss);
}

TEST(Interval, NormalApproximationReference) {
  const Proportion p = proportion_ci(200.0 / 400.0, 400);
  EXPECT_NEAR(p.p * 100, 50.0, 1e-12);
  EXPECT_NEAR(p.half_width * 100, 4.9, 0.005);
  EXPECT_NEAR(p.lo, p.p - p.half_width, 1e-15);
  EXPECT_NEAR(p.hi, p.p + p.half_width, 1e-15);
}

TEST(Interval, ShrinksWithSquareRootOfN) {
  for (double q : {0.1, 0.3, 0.5}) {
    const double w100 = proportion_ci(q, 100).half_width;
    const double w400 = proportion_ci(q, 400).half_width;
    const double w1600 = proportion_ci(q, 1600).half_width;
    EXPECT_NEAR(w100 / w400, 2.0, 1e-12);
    EXPECT_NEAR(w400 / w1600, 2.0, 1e-12);
  }
  EXPECT_EQ(proportion_ci(0.0, 50).half_width, 0.0);
}

TEST(Interval, WilsonReference) {
  // Independent closed form for 8 successes in 10 trials.
  const double z = 1.959963984540054;
  const double n = 10;
  const double p = 0.8;
  const double centre = (p + z * z / (2 * n)) / (1 + z * z / n);
  const double spread = z / (1 + z * z / n) * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n));
  const Proportion w = proportion_ci(p, 10, IntervalKind::kWilson);
  EXPECT_NEAR(w.lo, centre - spread, 1e-12);
  EXPECT_NEAR(w.hi, centre + spread, 1e-12);
  EXPECT_NEAR(w.half_width, spread, 1e-12);
  EXPECT_GT(proportion_ci(0.0, 10, IntervalKind::kWilson).hi, 0.0);
  EXPECT_EQ(parse_interval_kind("wilson"), IntervalKind::kWilson);
  EXPECT_THROW(parse_interval_kind("exact"), ConfigError);
}

TEST(Aggregate, CountsAndOrderIndependence) {
  std::vector<MatchRecord> recs;
  std::mt19937 gen(3);
  for (int g = 0; g < 60; ++g) {
    const int rot = g % 2;
    const Outcome a = static_cast<Outcome>(gen() % 3);
    const Outcome b = a == Outcome::kWin ? Outcome::kLoss : a == Outcome::kLoss ? Outcome::kWin : Outcome::kDraw;
    recs.push_back(rot == 0 ? record(g, {0, 1}, {a, b}) : record(g, {1, 0}, {b, a}));
  }
  const std::vector<std::string> agents{"agent0", "agent1"};
  const auto sum = aggregate(recs, agents);
  std::shuffle(recs.begin(), recs.end(), gen);
  const auto shuffled = aggregate(recs, agents);
  ASSERT_EQ(sum.size(), 2u);
  for (int s = 0; s < 2; ++s) {
    EXPECT_EQ(sum[s].games, 60u);
    EXPECT_EQ(sum[s].wins + sum[s].draws + sum[s].losses, 60u);
    EXPECT_EQ(sum[s].wins, shuffled[s].wins);
    EXPECT_EQ(sum[s].draws, shuffled[s].draws);
    EXPECT_DOUBLE_EQ(sum[s].score.p, shuffled[s].score.p);
    EXPECT_NEAR(sum[s].win.p + sum[s].draw.p + sum[s].loss.p, 1.0, 1e-12);
  }
  EXPECT_EQ(sum[0].wins, sum[1].losses);
  EXPECT_NEAR(sum[0].score.p + sum[1].score.p, 1.0, 1e-12);
}

TEST(Seeds, RotationAndGrouping) {
  const GameSeeds a = game_seeds(5, 0, 4);
  const GameSeeds b = game_seeds(5, 3, 4);
  const GameSeeds c = game_seeds(5, 4, 4);
  EXPECT_EQ(a.rotation, 0);
  EXPECT_EQ(b.rotation, 3);
  EXPECT_EQ(a.board, b.board);
  EXPECT_EQ(a.seat, b.seat);
  EXPECT_NE(a.board, c.board);
  EXPECT_EQ(a.seat.size(), 4u);
  EXPECT_NE(a.seat[0], a.seat[1]);
}

TEST(AgentSpec, Grammar) {
  EXPECT_EQ(parse_agent_spec("rule").kind, AgentSpec::Kind::kRule);
  EXPECT_EQ(parse_agent_spec("random").kind, AgentSpec::Kind::kRandom);
  const AgentSpec f = parse_agent_spec("follower:/tmp/x.bin");
  EXPECT_EQ(f.kind, AgentSpec::Kind::kFollower);
  EXPECT_EQ(f.follower_path, "/tmp/x.bin");
  const AgentSpec p = parse_agent_spec("mcts-ucb:iters=7");
  EXPECT_EQ(p.kind, AgentSpec::Kind::kPlanner);
  EXPECT_EQ(p.planner.iterations, 7);
  EXPECT_THROW(parse_agent_spec("human"), ConfigError);
  EXPECT_THROW(parse_agent_spec("follower:"), ConfigError);
  EXPECT_THROW(matrix_agent_factory(parse_agent_spec("rule")), ConfigError);
  EXPECT_THROW(grid_agent_factory(parse_agent_spec("follower:/nonexistent.bin")), ConfigError);
}

TEST(ParallelFor, RunsEveryIndexAndRethrowsLowest) {
  std::vector<int> hits(50, 0);
  parallel_for(50, 3, [&](int i) { hits[static_cast<std::size_t>(i)] += 1; });
  EXPECT_EQ(std::count(hits.begin(), hits.end(), 1), 50);
  try {
    parallel_for(20, 4, [](int i) {
      if (i == 7 || i == 13) throw std::runtime_error("fail " + std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "fail 7");
  }
}

TournamentConfig rule_config(int games, std::uint64_t seed) {
  TournamentConfig c;
  c.env = "gridarena-fast";
  c.agents = {"rule", "rule", "rule", "rule"};
  c.games = games;
  c.seed = seed;
  c.workers = 1;
  return c;
}

TEST(Tournament, RuleAgentsPercentagesSumToHundred) {
  const TournamentResult r = run_named_tournament(rule_config(8, 1));
  ASSERT_EQ(r.records.size(), 8u);
  ASSERT_EQ(r.summary.size(), 4u);
  for (const SlotSummary& s : r.summary) {
    EXPECT_EQ(s.games, 8u);
    EXPECT_NEAR(100 * (s.win.p + s.draw.p + s.loss.p), 100.0, 1e-9);
  }
  for (const MatchRecord& m : r.records) {
    EXPECT_LE(std::count(m.seat_outcome.begin(), m.seat_outcome.end(), Outcome::kWin), 1);
    EXPECT_GE(m.length, 1);
    EXPECT_LE(m.length, 200);
  }
}

TEST(Tournament, DeterministicAcrossWorkerCounts) {
  TournamentConfig c = rule_config(8, 4);
  c.agents = {"rule", "random", "mcs-ts:iters=5,depth=3", "rule"};
  const TournamentResult a = run_named_tournament(c);
  c.workers = 3;
  const TournamentResult b = run_named_tournament(c);
  EXPECT_EQ(matches_csv(a.records), matches_csv(b.records));
  const auto ja = nlohmann::json::parse(summary_json(a, "t"));
  const auto jb = nlohmann::json::parse(summary_json(b, "t"));
  EXPECT_EQ(ja.at("results"), jb.at("results"));
}

// Swapping the two agents of a head-to-head replays the same games with the
// roles exchanged, so the rates are exact complements.
TEST(Tournament, SwappingAgentsGivesComplementaryRates) {
  TournamentConfig c;
  c.env = "gridarena2p-fast";
  c.agents = {"rule", "random"};
  c.games = 10;
  c.seed = 9;
  c.workers = 1;
  const TournamentResult ab = run_named_tournament(c);
  std::swap(c.agents[0], c.agents[1]);
  const TournamentResult ba = run_named_tournament(c);
  EXPECT_NEAR(ab.summary[0].score.p + ba.summary[0].score.p, 1.0, 1e-12);
  EXPECT_EQ(ab.summary[0].wins, ba.summary[1].wins);
  EXPECT_EQ(ab.summary[0].draws, ba.summary[1].draws);
}

TEST(Tournament, MatrixEnvironment) {
  const auto path = std::filesystem::temp_directory_path() / "simulplan-test-dominance.json";
  write_file(path.string(), R"({"name":"dom","payoff":[[1,0,1],[0,-1,0],[-1,-1,-1]]})");
  TournamentConfig c;
  c.env = "matrix:" + path.string();
  c.agents = {"fdts-ts:iters=200,depth=1", "random"};
  c.games = 20;
  c.workers = 1;
  const TournamentResult r = run_named_tournament(c);
  EXPECT_EQ(r.summary[0].losses, 0u);
  EXPECT_GT(r.summary[0].score.p, 0.6);
  std::filesystem::remove(path);
}

TEST(Tournament, ValidationErrors) {
  TournamentConfig c = rule_config(0, 0);
  EXPECT_THROW(run_named_tournament(c), ConfigError);
  c.games = 1;
  c.agents = {"rule", "rule"};
  EXPECT_THROW(run_named_tournament(c), ConfigError);
  c.env = "chess";
  EXPECT_THROW(run_named_tournament(c), ConfigError);
}

TEST(Revisits, RatioAndSmoothingReference) {
  std::vector<StepStats> events(3);
  for (int i = 0; i < 3; ++i) {
    events[static_cast<std::size_t>(i)].step = i;
    events[static_cast<std::size_t>(i)].counters.reset(2);
  }
  events[0].counters.visits = {0, 10, 0};
  events[0].counters.revisits = {0, 0, 0};
  events[1].counters.visits = {0, 10, 4};
  events[1].counters.revisits = {0, 10, 1};
  events[2].counters.visits = {0, 10, 4};
  events[2].counters.revisits = {0, 5, 4};
  const auto rows = revisit_ratio("p", 0, events);
  ASSERT_EQ(rows.size(), 5u);  // depth 2 has no visits at step 0
  EXPECT_EQ(rows[0].ratio, 0.0);
  EXPECT_EQ(rows[0].smoothed, 0.0);
  const auto at = [&](int step, int depth) {
    return *std::find_if(rows.begin(), rows.end(), [&](const RevisitRow& r) { return r.step == step && r.depth == depth; });
  };
  EXPECT_NEAR(at(1, 1).smoothed, 0.1, 1e-12);
  EXPECT_NEAR(at(2, 1).smoothed, 0.9 * 0.1 + 0.1 * 0.5, 1e-12);
  EXPECT_NEAR(at(1, 2).smoothed, 0.25, 1e-12);
  EXPECT_NEAR(at(2, 2).smoothed, 0.9 * 0.25 + 0.1, 1e-12);
  EXPECT_NEAR(mean_smoothed(rows, "p", 1), (0.0 + 0.1 + 0.14) / 3, 1e-12);
  EXPECT_TRUE(std::isnan(mean_smoothed(rows, "q", 1)));
}

TEST(Revisits, FirstIterationSeesNothingForcedPathSeesEverything) {
  // One action per player: every descent follows the same path.
  auto game = std::make_shared<const matrix::MatrixGame>(
      "forced", std::vector<int>{1, 1}, std::vector<std::array<int, kMaxPlayers>>{{0, 0, 0, 0}}, 4);
  matrix::MatrixState s(game);
  PlannerConfig c;
  c.algorithm = Algorithm::kFdts;
  c.iterations = 1;
  c.depth = 3;
  Planner<matrix::MatrixState> planner(c);
  planner.plan(s);
  StepStats first{0, 0, planner.tree().size(), planner.tree().counters()};
  s = s.step(JointAction(2));
  planner.advance(s);
  PlannerConfig more = c;
  more.iterations = 5;
  Planner<matrix::MatrixState> second(more);
  second.plan(s);
  second.plan(s);  // tree kept: every visit is now a revisit
  StepStats later{0, 1, second.tree().size(), second.tree().counters()};
  const std::vector<StepStats> events{first, later};
  const auto rows = revisit_ratio("fdts", 0, events, 0.0);
  for (const RevisitRow& r : rows) {
    if (r.step == 0) EXPECT_EQ(r.ratio, 0.0) << r.depth;
    if (r.step == 1) EXPECT_EQ(r.ratio, 1.0) << r.depth;
  }
}

TEST(Revisits, StudyProducesRowsForEveryPlanner) {
  grid::GridConfig env = grid::GridConfig::ffa_fast();
  env.step_limit = 15;
  const RevisitStudy study =
      run_revisit_study({"fdts-ts:iters=20,depth=5", "mcts-ts:iters=20,depth=5"}, 1, 3, env, 1);
  EXPECT_EQ(study.planners.size(), 2u);
  for (const std::string& p : study.planners) {
    EXPECT_TRUE(std::isfinite(mean_smoothed(study.rows, p, 1))) << p;
  }
  for (const RevisitRow& r : study.rows) {
    EXPECT_GE(r.ratio, 0.0);
    EXPECT_LE(r.ratio, 1.0);
    EXPECT_LE(r.revisits, r.visits);
  }
  EXPECT_NE(revisits_csv(study.rows).find("planner,game,step,depth"), std::string::npos);
}

TEST(Output, CsvAndJsonShapes) {
  TournamentConfig c = rule_config(4, 2);
  c.collect_stats = true;
  c.agents = {"fdts-ts:iters=4,depth=3", "rule", "rule", "rule"};
  const TournamentResult r = run_named_tournament(c);
  const std::string csv = matches_csv(r.records);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "game,env,seed,rotation,length,agents,slots,outcomes");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
  EXPECT_FALSE(planner_stats_csv(r.records).empty());
  const auto j = nlohmann::json::parse(summary_json(r, "tournament"));
  EXPECT_EQ(j.at("results").at("games"), 4);
  EXPECT_EQ(j.at("results").at("slots").size(), 4u);
  EXPECT_TRUE(j.at("metadata").contains("wall_seconds"));
  EXPECT_NE(summary_table(r).find("fdts-ts"), std::string::npos);
}

}  // namespace
}  // namespace simulplan::harness
