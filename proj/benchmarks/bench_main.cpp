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

#include <benchmark/benchmark.h>

#include "simulplan/bandits.hpp"
#include "simulplan/grid_arena.hpp"
#include "simulplan/grid_features.hpp"
#include "simulplan/planners.hpp"
#include "simulplan/rule_agent.hpp"

namespace {

using simulplan::Action;
using simulplan::JointAction;
using simulplan::PlayerId;
using simulplan::grid::GridConfig;
using simulplan::grid::GridState;

// A mid-game position reached by rule-based self-play.
GridState midgame(int steps) {
  GridState s = GridState::generate(GridConfig::ffa(), 11);
  for (int t = 0; t < steps && !s.is_terminal(); ++t) {
    JointAction j(4);
    for (int p = 0; p < 4; ++p) {
      if (s.is_acting(PlayerId{p})) j[p] = simulplan::grid::rule_based_action(s, PlayerId{p}, 3);
    }
    s = s.step(j);
  }
  return s;
}

void BM_GridStep(benchmark::State& state) {
  const GridState s = midgame(40);
  JointAction j(4);
  for (auto _ : state) benchmark::DoNotOptimize(s.step(j));
}
BENCHMARK(BM_GridStep);

void BM_MaskedActions(benchmark::State& state) {
  const GridState s = midgame(40);
  for (auto _ : state) {
    for (int p = 0; p < 4; ++p) {
      if (s.agent(PlayerId{p}).alive) benchmark::DoNotOptimize(s.masked_actions(PlayerId{p}));
    }
  }
}
BENCHMARK(BM_MaskedActions);

void BM_CanonicalKey(benchmark::State& state) {
  const GridState s = midgame(40);
  for (auto _ : state) benchmark::DoNotOptimize(s.canonical_key());
}
BENCHMARK(BM_CanonicalKey);

void BM_RuleAgent(benchmark::State& state) {
  const GridState s = midgame(40);
  for (auto _ : state) benchmark::DoNotOptimize(simulplan::grid::rule_based_action(s, PlayerId{0}, 1));
}
BENCHMARK(BM_RuleAgent);

void BM_Featurize(benchmark::State& state) {
  const GridState s = midgame(40);
  for (auto _ : state) benchmark::DoNotOptimize(simulplan::grid::featurize(s, PlayerId{0}));
}
BENCHMARK(BM_Featurize);

void BM_ThompsonSelect(benchmark::State& state) {
  simulplan::ActionList arms;
  for (std::uint8_t a = 0; a < 6; ++a) arms.push_back(Action{a});
  simulplan::BanditInstance b(arms, simulplan::BanditSpec::thompson());
  simulplan::Rng rng(5);
  for (int i = 0; i < 60; ++i) update(b, Action{static_cast<std::uint8_t>(i % 6)}, (i % 3) - 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(simulplan::ts_select(b, rng));
}
BENCHMARK(BM_ThompsonSelect);

void BM_UcbSelect(benchmark::State& state) {
  simulplan::ActionList arms;
  for (std::uint8_t a = 0; a < 6; ++a) arms.push_back(Action{a});
  simulplan::BanditInstance b(arms, simulplan::BanditSpec::ucb1(2.0f));
  simulplan::Rng rng(5);
  for (int i = 0; i < 60; ++i) update(b, Action{static_cast<std::uint8_t>(i % 6)}, (i % 3) - 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(simulplan::ucb_select(b, rng));
}
BENCHMARK(BM_UcbSelect);

// One full planning call (100 iterations, k = 20) from a fresh tree.
void BM_Plan(benchmark::State& state, const char* spec) {
  const GridState s = midgame(40);
  simulplan::PlannerConfig cfg = simulplan::parse_planner_spec(spec);
  for (auto _ : state) {
    simulplan::SearchTree tree(cfg.bandit, false);
    benchmark::DoNotOptimize(simulplan::plan(tree, s, cfg));
  }
}
BENCHMARK_CAPTURE(BM_Plan, fdts_ts, "fdts-ts")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Plan, mcts_ts, "mcts-ts")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Plan, mcs_ts, "mcs-ts")->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
