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

#include "simulplan/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

namespace simulplan::harness {
namespace {

constexpr double kZ95 = 1.959963984540054;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i != 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string fixed(double v, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

nlohmann::json proportion_json(const Proportion& p) {
  return {{"p", p.p}, {"half_width", p.half_width}, {"lo", p.lo}, {"hi", p.hi}};
}

}  // namespace

Outcome outcome_from_reward(int reward) {
  if (reward > 0) return Outcome::kWin;
  if (reward < 0) return Outcome::kLoss;
  return Outcome::kDraw;
}

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kWin:
      return "win";
    case Outcome::kDraw:
      return "draw";
    case Outcome::kLoss:
      return "loss";
  }
  return "?";
}

IntervalKind parse_interval_kind(const std::string& id) {
  if (id == "normal") return IntervalKind::kNormal;
  if (id == "wilson") return IntervalKind::kWilson;
  throw ConfigError("unknown interval kind '" + id + "' (expected normal or wilson)");
}

const char* to_string(IntervalKind kind) { return kind == IntervalKind::kNormal ? "normal" : "wilson"; }

Proportion proportion_ci(double p, std::size_t n, IntervalKind kind) {
  if (n == 0) throw ContractError("confidence interval over zero trials");
  if (!(p >= 0.0 && p <= 1.0)) throw ContractError("proportion outside [0, 1]");
  const double nn = static_cast<double>(n);
  Proportion out;
  out.p = p;
  if (kind == IntervalKind::kNormal) {
    out.half_width = kZ95 * std::sqrt(p * (1.0 - p) / nn);
    out.lo = p - out.half_width;
    out.hi = p + out.half_width;
    return out;
  }
  const double z2 = kZ95 * kZ95;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double spread = kZ95 * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  out.lo = center - spread;
  out.hi = center + spread;
  out.half_width = spread;
  return out;
}

AgentSpec parse_agent_spec(const std::string& text, const PlannerConfig& planner_defaults) {
  AgentSpec spec;
  spec.text = text;
  if (text == "rule") {
    spec.kind = AgentSpec::Kind::kRule;
  } else if (text == "random") {
    spec.kind = AgentSpec::Kind::kRandom;
  } else if (text.rfind("follower:", 0) == 0) {
    spec.kind = AgentSpec::Kind::kFollower;
    spec.follower_path = text.substr(9);
    if (spec.follower_path.empty()) throw ConfigError("follower agent needs a checkpoint path");
  } else {
    spec.kind = AgentSpec::Kind::kPlanner;
    spec.planner = parse_planner_spec(text, planner_defaults);
  }
  return spec;
}

void RuleAgent::begin(const grid::GridState& initial, PlayerId seat, std::uint64_t seed) {
  (void)initial;
  seat_ = seat;
  seed_ = seed;
}

Action RuleAgent::act(const grid::GridState& state) { return grid::rule_based_action(state, seat_, seed_); }

void FollowerAgent::begin(const grid::GridState& initial, PlayerId seat, std::uint64_t seed) {
  (void)seed;
  if (policy_->dims().input != grid::feature_size(initial.height(), initial.width())) {
    throw ConfigError("follower checkpoint was trained on a different board size");
  }
  seat_ = seat;
}

Action FollowerAgent::act(const grid::GridState& state) { return follower::follower_act(*policy_, state, seat_); }

AgentFactory<grid::GridState> grid_agent_factory(const AgentSpec& spec) {
  using G = grid::GridState;
  switch (spec.kind) {
    case AgentSpec::Kind::kPlanner: {
      const PlannerConfig cfg = spec.planner;
      return [cfg] { return std::make_unique<PlannerAgent<G>>(cfg); };
    }
    case AgentSpec::Kind::kRule:
      return [] { return std::make_unique<RuleAgent>(); };
    case AgentSpec::Kind::kRandom:
      return [] { return std::make_unique<RandomAgent<G>>(); };
    case AgentSpec::Kind::kFollower: {
      auto policy = std::make_shared<const follower::FollowerPolicy>(
          follower::load_checkpoint(spec.follower_path).policy);
      return [policy] { return std::make_unique<FollowerAgent>(policy); };
    }
  }
  throw ContractError("unknown agent kind");
}

AgentFactory<matrix::MatrixState> matrix_agent_factory(const AgentSpec& spec) {
  using M = matrix::MatrixState;
  switch (spec.kind) {
    case AgentSpec::Kind::kPlanner: {
      const PlannerConfig cfg = spec.planner;
      return [cfg] { return std::make_unique<PlannerAgent<M>>(cfg); };
    }
    case AgentSpec::Kind::kRandom:
      return [] { return std::make_unique<RandomAgent<M>>(); };
    case AgentSpec::Kind::kRule:
    case AgentSpec::Kind::kFollower:
      break;
  }
  throw ConfigError("agent '" + spec.text + "' is only available on grid environments");
}

Outcome MatchRecord::slot_outcome(int slot) const {
  for (std::size_t seat = 0; seat < seat_slot.size(); ++seat) {
    if (seat_slot[seat] == slot) return seat_outcome[seat];
  }
  throw ContractError("slot not present in match record");
}

std::vector<SlotSummary> aggregate(std::span<const MatchRecord> records, std::span<const std::string> slot_agents,
                                   IntervalKind kind) {
  std::vector<SlotSummary> out(slot_agents.size());
  for (std::size_t s = 0; s < out.size(); ++s) out[s].agent = slot_agents[s];
  for (const MatchRecord& rec : records) {
    for (std::size_t s = 0; s < out.size(); ++s) {
      SlotSummary& sum = out[s];
      ++sum.games;
      switch (rec.slot_outcome(static_cast<int>(s))) {
        case Outcome::kWin:
          ++sum.wins;
          break;
        case Outcome::kDraw:
          ++sum.draws;
          break;
        case Outcome::kLoss:
          ++sum.losses;
          break;
      }
    }
  }
  for (SlotSummary& sum : out) {
    if (sum.games == 0) continue;
    const double n = static_cast<double>(sum.games);
    sum.win = proportion_ci(static_cast<double>(sum.wins) / n, sum.games, kind);
    sum.draw = proportion_ci(static_cast<double>(sum.draws) / n, sum.games, kind);
    sum.loss = proportion_ci(static_cast<double>(sum.losses) / n, sum.games, kind);
    sum.score = proportion_ci((static_cast<double>(sum.wins) + 0.5 * static_cast<double>(sum.draws)) / n, sum.games,
                              kind);
  }
  return out;
}

void TournamentConfig::validate() const {
  if (games < 1) throw ConfigError("games must be >= 1");
  if (agents.size() < 2) throw ConfigError("a tournament needs at least two agents");
  if (agents.size() > static_cast<std::size_t>(kMaxPlayers)) throw ConfigError("too many agents");
  if (workers < 0) throw ConfigError("workers must be >= 0");
}

int resolve_workers(int requested) {
  if (const char* env = std::getenv("SIMULPLAN_WORKERS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) throw ConfigError("SIMULPLAN_WORKERS must be a positive integer");
    return static_cast<int>(v);
  }
  if (requested > 0) return requested;
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

void parallel_for(int count, int workers, const std::function<void(int)>& task) {
  workers = std::max(1, std::min(workers, count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(std::max(count, 0)));
  std::atomic<int> next{0};
  auto worker = [&] {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        task(i);
      } catch (...) {
        errors[static_cast<std::size_t>(i)] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

GameSeeds game_seeds(std::uint64_t seed, int game, int num_players) {
  GameSeeds s;
  const auto group = static_cast<std::uint64_t>(game / num_players);
  s.rotation = game % num_players;
  s.board = derive_seed(seed, {group, 0});
  for (int seat = 0; seat < num_players; ++seat) {
    s.seat.push_back(derive_seed(seed, {group, 1, static_cast<std::uint64_t>(seat)}));
  }
  return s;
}

bool is_grid_env(const std::string& env) {
  return env == "gridarena" || env == "gridarena-fast" || env == "gridarena2p" || env == "gridarena2p-fast";
}

grid::GridConfig grid_env_config(const std::string& env) {
  if (env == "gridarena") return grid::GridConfig::ffa();
  if (env == "gridarena-fast") return grid::GridConfig::ffa_fast();
  if (env == "gridarena2p") return grid::GridConfig::duel(800);
  if (env == "gridarena2p-fast") return grid::GridConfig::duel(200);
  throw ConfigError("unknown grid environment '" + env + "'");
}

TournamentResult run_named_tournament(const TournamentConfig& config, const std::optional<grid::GridConfig>& grid,
                                      const PlannerConfig& planner_defaults) {
  config.validate();
  if (is_grid_env(config.env)) {
    const grid::GridConfig g = grid ? *grid : grid_env_config(config.env);
    g.validate();
    if (static_cast<std::size_t>(g.num_players) != config.agents.size()) {
      throw ConfigError(config.env + " needs " + std::to_string(g.num_players) + " agents, got " +
                        std::to_string(config.agents.size()));
    }
    std::vector<AgentFactory<grid::GridState>> factories;
    for (const std::string& a : config.agents) factories.push_back(grid_agent_factory(parse_agent_spec(a, planner_defaults)));
    return run_tournament<grid::GridState>(
        config, [g](std::uint64_t seed) { return grid::GridState::generate(g, seed); }, factories);
  }
  if (config.env.rfind("matrix:", 0) == 0) {
    auto game = std::make_shared<const matrix::MatrixGame>(matrix::MatrixGame::load(config.env.substr(7)));
    if (static_cast<std::size_t>(game->num_players()) != config.agents.size()) {
      throw ConfigError("matrix game needs " + std::to_string(game->num_players()) + " agents");
    }
    std::vector<AgentFactory<matrix::MatrixState>> factories;
    for (const std::string& a : config.agents) {
      factories.push_back(matrix_agent_factory(parse_agent_spec(a, planner_defaults)));
    }
    return run_tournament<matrix::MatrixState>(
        config, [game](std::uint64_t) { return matrix::MatrixState(game); }, factories);
  }
  throw ConfigError("unknown environment '" + config.env + "'");
}

std::vector<RevisitRow> revisit_ratio(const std::string& planner, int game, std::span<const StepStats> events,
                                      double decay) {
  std::vector<RevisitRow> rows;
  std::map<std::pair<int, int>, double> smoothed;  // (seat, depth) -> state
  for (const StepStats& ev : events) {
    const DepthCounters& c = ev.counters;
    for (int d = 1; d <= c.max_depth(); ++d) {
      const auto i = static_cast<std::size_t>(d);
      if (c.visits[i] == 0) continue;
      RevisitRow row;
      row.planner = planner;
      row.game = game;
      row.step = ev.step;
      row.depth = d;
      row.visits = c.visits[i];
      row.revisits = c.revisits[i];
      row.ratio = static_cast<double>(c.revisits[i]) / static_cast<double>(c.visits[i]);
      auto [it, fresh] = smoothed.try_emplace({ev.seat, d}, row.ratio);
      if (!fresh) it->second = decay * it->second + (1.0 - decay) * row.ratio;
      row.smoothed = it->second;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

double mean_smoothed(std::span<const RevisitRow> rows, const std::string& planner, int depth) {
  double total = 0.0;
  std::size_t n = 0;
  for (const RevisitRow& r : rows) {
    if (r.planner == planner && r.depth == depth) {
      total += r.smoothed;
      ++n;
    }
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : total / static_cast<double>(n);
}

RevisitStudy run_revisit_study(const std::vector<std::string>& planners, int games, std::uint64_t seed,
                               const grid::GridConfig& env, int workers, const PlannerConfig& planner_defaults) {
  if (planners.empty()) throw ConfigError("revisit study needs at least one planner");
  if (games < 1) throw ConfigError("games must be >= 1");
  env.validate();
  std::vector<PlannerConfig> configs;
  for (const std::string& p : planners) configs.push_back(parse_planner_spec(p, planner_defaults));
  const int n = env.num_players;
  const int jobs = static_cast<int>(planners.size()) * games;
  std::vector<std::vector<RevisitRow>> per_job(static_cast<std::size_t>(jobs));

  parallel_for(jobs, resolve_workers(workers), [&](int job) {
    const auto pi = static_cast<std::size_t>(job / games);
    const int g = job % games;
    const auto gs = static_cast<std::uint64_t>(g);
    PlannerAgent<grid::GridState> planner(configs[pi]);
    std::vector<RuleAgent> rules(static_cast<std::size_t>(n - 1));
    std::vector<Agent<grid::GridState>*> seats{&planner};
    std::vector<std::uint64_t> seeds{derive_seed(seed, {gs, 1, 0})};
    for (int p = 1; p < n; ++p) {
      seats.push_back(&rules[static_cast<std::size_t>(p - 1)]);
      seeds.push_back(derive_seed(seed, {gs, 1, static_cast<std::uint64_t>(p)}));
    }
    const EpisodeOutput ep = run_episode<grid::GridState>(grid::GridState::generate(env, derive_seed(seed, {gs, 0})),
                                                          seats, seeds, true);
    per_job[static_cast<std::size_t>(job)] = revisit_ratio(planners[pi], g, ep.stats);
  });

  RevisitStudy study;
  study.planners = planners;
  for (auto& rows : per_job) {
    for (auto& r : rows) study.rows.push_back(std::move(r));
  }
  return study;
}

std::string matches_csv(std::span<const MatchRecord> records) {
  std::ostringstream out;
  out << "game,env,seed,rotation,length,agents,slots,outcomes\n";
  for (const MatchRecord& r : records) {
    std::vector<std::string> slots;
    std::vector<std::string> outcomes;
    for (int s : r.seat_slot) slots.push_back(std::to_string(s));
    for (Outcome o : r.seat_outcome) outcomes.emplace_back(to_string(o));
    out << r.game << "," << csv_field(r.env) << "," << r.seed << "," << r.rotation << "," << r.length << ","
        << csv_field(join(r.seat_agent, "|")) << "," << join(slots, "|") << "," << join(outcomes, "|") << "\n";
  }
  return out.str();
}

std::string planner_stats_csv(std::span<const MatchRecord> records) {
  std::ostringstream out;
  out << "game,seat,agent,step,tree_size,max_revisit_depth,visits,revisits\n";
  for (const MatchRecord& r : records) {
    for (const StepStats& s : r.stats) {
      std::uint64_t visits = 0;
      std::uint64_t revisits = 0;
      for (std::size_t d = 1; d < s.counters.visits.size(); ++d) {
        visits += s.counters.visits[d];
        revisits += s.counters.revisits[d];
      }
      out << r.game << "," << s.seat << "," << csv_field(r.seat_agent[static_cast<std::size_t>(s.seat)]) << ","
          << s.step << "," << s.tree_size << "," << s.counters.max_revisit_depth() << "," << visits << ","
          << revisits << "\n";
    }
  }
  return out.str();
}

std::string revisits_csv(std::span<const RevisitRow> rows) {
  std::ostringstream out;
  out << "planner,game,step,depth,visits,revisits,ratio,smoothed\n";
  for (const RevisitRow& r : rows) {
    out << csv_field(r.planner) << "," << r.game << "," << r.step << "," << r.depth << "," << r.visits << ","
        << r.revisits << "," << fixed(r.ratio, 6) << "," << fixed(r.smoothed, 6) << "\n";
  }
  return out.str();
}

std::string summary_json(const TournamentResult& result, const std::string& command) {
  nlohmann::ordered_json slots = nlohmann::ordered_json::array();
  for (const SlotSummary& s : result.summary) {
    slots.push_back({{"agent", s.agent},
                     {"games", s.games},
                     {"wins", s.wins},
                     {"draws", s.draws},
                     {"losses", s.losses},
                     {"win", proportion_json(s.win)},
                     {"draw", proportion_json(s.draw)},
                     {"loss", proportion_json(s.loss)},
                     {"score", proportion_json(s.score)}});
  }
  std::uint64_t steps = 0;
  for (const MatchRecord& r : result.records) steps += static_cast<std::uint64_t>(r.length);
  nlohmann::ordered_json doc;
  doc["results"] = {{"env", result.config.env},
                    {"games", result.config.games},
                    {"seed", result.config.seed},
                    {"interval", to_string(result.config.interval)},
                    {"total_steps", steps},
                    {"slots", slots}};
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  doc["metadata"] = {{"command", command},
                     {"generated_at", stamp},
                     {"wall_seconds", result.wall_seconds},
                     {"workers", result.workers},
                     {"revisit_smoothing", "ewma decay " + fixed(kRevisitDecay, 2)}};
  return doc.dump(2) + "\n";
}

std::string summary_table(const TournamentResult& result) {
  std::ostringstream out;
  out << result.config.env << ", " << result.config.games << " games, seed " << result.config.seed << "\n";
  std::size_t width = 5;
  for (const SlotSummary& s : result.summary) width = std::max(width, s.agent.size());
  out << std::left << std::setw(static_cast<int>(width) + 2) << "agent" << std::setw(18) << "win" << std::setw(18)
      << "draw" << std::setw(18) << "loss" << "score\n";
  auto cell = [](const Proportion& p) {
    return fixed(100.0 * p.p, 1) + " +/- " + fixed(100.0 * p.half_width, 1) + "%";
  };
  for (const SlotSummary& s : result.summary) {
    out << std::setw(static_cast<int>(width) + 2) << s.agent << std::setw(18) << cell(s.win) << std::setw(18)
        << cell(s.draw) << std::setw(18) << cell(s.loss) << cell(s.score) << "\n";
  }
  return out.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void write_tournament_outputs(const TournamentResult& result, const std::string& dir, const std::string& command) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_file((base / "matches.csv").string(), matches_csv(result.records));
  if (result.config.collect_stats) write_file((base / "planner_stats.csv").string(), planner_stats_csv(result.records));
  write_file((base / "summary.json").string(), summary_json(result, command));
}

}  // namespace simulplan::harness
