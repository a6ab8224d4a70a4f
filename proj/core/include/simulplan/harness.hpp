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

#ifndef SIMULPLAN_HARNESS_HPP_
#define SIMULPLAN_HARNESS_HPP_

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "simulplan/follower.hpp"
#include "simulplan/game.hpp"
#include "simulplan/grid_arena.hpp"
#include "simulplan/matrix_game.hpp"
#include "simulplan/planners.hpp"
#include "simulplan/rng.hpp"
#include "simulplan/rule_agent.hpp"
#include "simulplan/search_tree.hpp"

namespace simulplan::harness {

enum class Outcome : std::uint8_t { kWin, kDraw, kLoss };

Outcome outcome_from_reward(int reward);
const char* to_string(Outcome outcome);

// ---------------------------------------------------------------------------
// Statistics

enum class IntervalKind : std::uint8_t { kNormal, kWilson };

IntervalKind parse_interval_kind(const std::string& id);
const char* to_string(IntervalKind kind);

struct Proportion {
  double p = 0.0;
  double half_width = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// 95% interval for a proportion estimated from n trials. Normal:
/// p +/- 1.96 sqrt(p(1-p)/n). Wilson: the score interval, reported with
/// half_width = (hi - lo) / 2.
Proportion proportion_ci(double p, std::size_t n, IntervalKind kind = IntervalKind::kNormal);

// ---------------------------------------------------------------------------
// Agents

/// One seat's controller for the length of an episode.
template <GameState S>
class Agent {
 public:
  virtual ~Agent() = default;
  virtual void begin(const S& initial, PlayerId seat, std::uint64_t seed) = 0;
  virtual Action act(const S& state) = 0;
  /// Called with the actual successor after every step.
  virtual void observe(const S& next) { (void)next; }
  /// Search tree of planner agents, for instrumentation.
  virtual const SearchTree* tree() const { return nullptr; }
};

struct AgentSpec {
  enum class Kind : std::uint8_t { kPlanner, kRule, kFollower, kRandom };

  Kind kind = Kind::kRule;
  std::string text;
  PlannerConfig planner;
  std::string follower_path;
};

/// Grammar: "rule", "random", "follower:<checkpoint path>", or a planner spec
/// "<mcs|mcts|fdts>-<ts|ucb|random>[-norollout][:key=value,...]". Throws
/// ConfigError for anything else.
AgentSpec parse_agent_spec(const std::string& text, const PlannerConfig& planner_defaults = {});

template <GameState S>
class PlannerAgent final : public Agent<S> {
 public:
  explicit PlannerAgent(PlannerConfig config) : config_(config) { config_.validate(); }

  void begin(const S& initial, PlayerId seat, std::uint64_t seed) override {
    (void)initial;
    PlannerConfig cfg = config_;
    cfg.seed = seed;
    planner_.emplace(cfg);
    seat_ = seat;
  }
  Action act(const S& state) override { return planner_->plan(state)[seat_]; }
  void observe(const S& next) override { planner_->advance(next); }
  const SearchTree* tree() const override { return planner_ ? &planner_->tree() : nullptr; }

 private:
  PlannerConfig config_;
  std::optional<Planner<S>> planner_;
  PlayerId seat_;
};

template <GameState S>
class RandomAgent final : public Agent<S> {
 public:
  void begin(const S& initial, PlayerId seat, std::uint64_t seed) override {
    (void)initial;
    seat_ = seat;
    rng_.seed(seed);
  }
  Action act(const S& state) override {
    const ActionList legal = state.legal_actions(seat_);
    return legal[static_cast<std::size_t>(uniform_index(rng_, static_cast<int>(legal.size())))];
  }

 private:
  PlayerId seat_;
  Rng rng_;
};

class RuleAgent final : public Agent<grid::GridState> {
 public:
  void begin(const grid::GridState& initial, PlayerId seat, std::uint64_t seed) override;
  Action act(const grid::GridState& state) override;

 private:
  PlayerId seat_;
  std::uint64_t seed_ = 0;
};

class FollowerAgent final : public Agent<grid::GridState> {
 public:
  explicit FollowerAgent(std::shared_ptr<const follower::FollowerPolicy> policy) : policy_(std::move(policy)) {}
  void begin(const grid::GridState& initial, PlayerId seat, std::uint64_t seed) override;
  Action act(const grid::GridState& state) override;

 private:
  std::shared_ptr<const follower::FollowerPolicy> policy_;
  PlayerId seat_;
};

template <GameState S>
using AgentFactory = std::function<std::unique_ptr<Agent<S>>()>;

/// Follower checkpoints are loaded once, when the factory is built.
AgentFactory<grid::GridState> grid_agent_factory(const AgentSpec& spec);
/// Planner and random agents only.
AgentFactory<matrix::MatrixState> matrix_agent_factory(const AgentSpec& spec);

// ---------------------------------------------------------------------------
// Episodes and tournaments

/// Planner instrumentation for one decision.
struct StepStats {
  int seat = 0;
  int step = 0;
  std::size_t tree_size = 0;
  DepthCounters counters;
};

struct EpisodeOutput {
  std::vector<int> rewards;
  int length = 0;
  std::vector<StepStats> stats;
};

template <GameState S>
EpisodeOutput run_episode(S state, std::span<Agent<S>* const> seats, std::span<const std::uint64_t> seeds,
                          bool collect_stats = false) {
  const int n = state.num_players();
  if (static_cast<int>(seats.size()) != n || seeds.size() != seats.size()) {
    throw ContractError("run_episode needs one agent and one seed per player");
  }
  for (int p = 0; p < n; ++p) seats[static_cast<std::size_t>(p)]->begin(state, PlayerId{p}, seeds[static_cast<std::size_t>(p)]);
  EpisodeOutput out;
  while (!state.is_terminal()) {
    JointAction joint(n);
    for (int p = 0; p < n; ++p) {
      if (!state.is_acting(PlayerId{p})) continue;
      Agent<S>* agent = seats[static_cast<std::size_t>(p)];
      joint[p] = agent->act(state);
      if (collect_stats && agent->tree() != nullptr) {
        const SearchTree& tree = *agent->tree();
        out.stats.push_back({p, out.length, tree.size(), tree.counters()});
      }
    }
    state = state.step(joint);
    ++out.length;
    for (int p = 0; p < n; ++p) seats[static_cast<std::size_t>(p)]->observe(state);
  }
  out.rewards.resize(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) out.rewards[static_cast<std::size_t>(p)] = state.terminal_reward(PlayerId{p});
  return out;
}

struct MatchRecord {
  int game = 0;
  std::string env;
  std::uint64_t seed = 0;  // board seed
  int rotation = 0;
  int length = 0;
  std::vector<std::string> seat_agent;
  std::vector<int> seat_slot;  // index of the configured agent in each seat
  std::vector<Outcome> seat_outcome;
  double wall_seconds = 0.0;
  std::vector<StepStats> stats;

  /// Outcome of configured agent `slot`.
  Outcome slot_outcome(int slot) const;
};

struct SlotSummary {
  std::string agent;
  std::size_t games = 0;
  std::size_t wins = 0;
  std::size_t draws = 0;
  std::size_t losses = 0;
  Proportion win;
  Proportion draw;
  Proportion loss;
  /// wins + draws / 2, the head-to-head rate.
  Proportion score;
};

/// Order-independent reduction over records.
std::vector<SlotSummary> aggregate(std::span<const MatchRecord> records, std::span<const std::string> slot_agents,
                                   IntervalKind kind = IntervalKind::kNormal);

struct TournamentConfig {
  std::string env;
  std::vector<std::string> agents;  // one per configured slot, == num players
  int games = 1;
  std::uint64_t seed = 0;
  /// 0: hardware concurrency. SIMULPLAN_WORKERS overrides either way.
  int workers = 0;
  bool collect_stats = false;
  IntervalKind interval = IntervalKind::kNormal;

  void validate() const;
};

struct TournamentResult {
  TournamentConfig config;
  std::vector<MatchRecord> records;
  std::vector<SlotSummary> summary;
  double wall_seconds = 0.0;
  int workers = 1;
};

/// Worker count after applying SIMULPLAN_WORKERS.
int resolve_workers(int requested);

/// Runs task(i) for i in [0, count) on a bounded pool; rethrows the exception
/// of the lowest failing index.
void parallel_for(int count, int workers, const std::function<void(int)>& task);

/// Seat rotation: game g uses board seed group g / N and places slot j in
/// seat (j + g) mod N. Agent seeds depend on (group, seat) only, so seat
/// swaps of otherwise identical slots replay identical games.
struct GameSeeds {
  int rotation = 0;
  std::uint64_t board = 0;
  std::vector<std::uint64_t> seat;
};
GameSeeds game_seeds(std::uint64_t seed, int game, int num_players);

template <GameState S>
TournamentResult run_tournament(const TournamentConfig& config, const std::function<S(std::uint64_t)>& make_initial,
                                const std::vector<AgentFactory<S>>& factories) {
  config.validate();
  const int n = static_cast<int>(config.agents.size());
  if (static_cast<int>(factories.size()) != n) throw ContractError("one agent factory per slot required");
  TournamentResult result;
  result.config = config;
  result.records.resize(static_cast<std::size_t>(config.games));
  result.workers = resolve_workers(config.workers);
  const auto start = std::chrono::steady_clock::now();

  parallel_for(config.games, result.workers, [&](int g) {
    const auto t0 = std::chrono::steady_clock::now();
    const GameSeeds seeds = game_seeds(config.seed, g, n);
    S initial = make_initial(seeds.board);
    if (initial.num_players() != n) throw ConfigError("environment player count does not match the agent list");
    std::vector<std::unique_ptr<Agent<S>>> owned(static_cast<std::size_t>(n));
    std::vector<Agent<S>*> seats(static_cast<std::size_t>(n));
    MatchRecord rec;
    rec.game = g;
    rec.env = config.env;
    rec.seed = seeds.board;
    rec.rotation = seeds.rotation;
    rec.seat_agent.resize(static_cast<std::size_t>(n));
    rec.seat_slot.resize(static_cast<std::size_t>(n));
    for (int slot = 0; slot < n; ++slot) {
      const auto seat = static_cast<std::size_t>((slot + seeds.rotation) % n);
      owned[seat] = factories[static_cast<std::size_t>(slot)]();
      seats[seat] = owned[seat].get();
      rec.seat_agent[seat] = config.agents[static_cast<std::size_t>(slot)];
      rec.seat_slot[seat] = slot;
    }
    EpisodeOutput ep = run_episode<S>(std::move(initial), seats, seeds.seat, config.collect_stats);
    rec.length = ep.length;
    for (int r : ep.rewards) rec.seat_outcome.push_back(outcome_from_reward(r));
    rec.stats = std::move(ep.stats);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.records[static_cast<std::size_t>(g)] = std::move(rec);
  });

  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.summary = aggregate(result.records, config.agents, config.interval);
  return result;
}

/// Tournament on a named environment: "gridarena", "gridarena-fast",
/// "gridarena2p", "gridarena2p-fast" or "matrix:<path>". `grid` overrides
/// the grid defaults of the named environment when set.
TournamentResult run_named_tournament(const TournamentConfig& config,
                                      const std::optional<grid::GridConfig>& grid = std::nullopt,
                                      const PlannerConfig& planner_defaults = {});

/// Grid configuration behind a named grid environment.
grid::GridConfig grid_env_config(const std::string& env);
bool is_grid_env(const std::string& env);

// ---------------------------------------------------------------------------
// Revisit instrumentation

struct RevisitRow {
  std::string planner;
  int game = 0;
  int step = 0;
  int depth = 0;
  std::uint64_t visits = 0;
  std::uint64_t revisits = 0;
  double ratio = 0.0;
  double smoothed = 0.0;
};

inline constexpr double kRevisitDecay = 0.9;

/// Per (step, depth) previously-seen fraction of tree visits, with an
/// exponentially weighted average over steps at each depth
/// (s = decay * s + (1 - decay) * raw, started at the first raw value).
/// Depths without visits at a step produce no row.
std::vector<RevisitRow> revisit_ratio(const std::string& planner, int game, std::span<const StepStats> events,
                                      double decay = kRevisitDecay);

/// Mean smoothed ratio at `depth` over all rows of `planner`; NaN if none.
double mean_smoothed(std::span<const RevisitRow> rows, const std::string& planner, int depth);

struct RevisitStudy {
  std::vector<std::string> planners;
  std::vector<RevisitRow> rows;
};

/// One instrumented game per (planner, game index): the planner in seat 0,
/// rule-based agents elsewhere, identical boards across planners.
RevisitStudy run_revisit_study(const std::vector<std::string>& planners, int games, std::uint64_t seed,
                               const grid::GridConfig& env, int workers = 0,
                               const PlannerConfig& planner_defaults = {});

// ---------------------------------------------------------------------------
// Output

std::string matches_csv(std::span<const MatchRecord> records);
std::string planner_stats_csv(std::span<const MatchRecord> records);
std::string revisits_csv(std::span<const RevisitRow> rows);
/// {"results": deterministic aggregates, "metadata": timestamps and timings}.
std::string summary_json(const TournamentResult& result, const std::string& command);
/// Text table for stdout.
std::string summary_table(const TournamentResult& result);

void write_file(const std::string& path, const std::string& contents);

/// Writes matches.csv, planner_stats.csv (when stats were collected) and
/// summary.json into `dir`, creating it if needed.
void write_tournament_outputs(const TournamentResult& result, const std::string& dir, const std::string& command);

}  // namespace simulplan::harness

#endif  // SIMULPLAN_HARNESS_HPP_
