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

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>
#include "simulplan/follower.hpp"
#include "simulplan/harness.hpp"
#include "simulplan/planners.hpp"

namespace simulplan::cli {
namespace {

using nlohmann::json;

struct Options {
  std::string env;
  std::string profile = "full";
  std::uint64_t seed = 0;
  int games = 0;
  int workers = 0;
  std::string out = "simulplan-out";
  std::string interval = "normal";
  std::optional<int> step_limit;

  int iterations = 100;
  int depth = 20;
  double c = 2.0;
  double alpha = 1.0;
  double beta = 1.0;
  std::string value = "reward";

  std::string seat0 = "fdts-ts";
  std::string opponents = "rule";
  std::vector<std::string> agents;
  bool planner_stats = false;

  std::string a;
  std::string b;

  int episodes = 500;
  int grad_steps = 200;
  int batch = 32;
  double lr = 1e-3;
  int hidden = 64;
  std::size_t buffer = 200000;
  std::string mode = "dagger";
  std::string oracle = "fdts-ts";
  int eval_games = 400;
  std::string checkpoint;
  std::string export_buffer;

  std::vector<std::string> planners{"fdts-ts", "fdts-ucb", "mcts-ts"};
};

// --- config file -----------------------------------------------------------

template <typename T>
void read_field(const json& obj, const char* key, T& dst, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    dst = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config field '" + where + key + "' has the wrong type");
  }
}

void check_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config section '" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown config field '" + where + key + "'");
    }
  }
}

void apply_config(const std::string& path, Options& o) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    std::string msg = e.what();
    if (auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ConfigError(path + ": " + msg);
  }
  check_keys(doc, {"env", "profile", "seed", "games", "workers", "out", "interval", "step_limit", "planner",
                   "tournament", "pair", "follower", "revisits"},
             "");
  read_field(doc, "env", o.env, "");
  read_field(doc, "profile", o.profile, "");
  read_field(doc, "seed", o.seed, "");
  read_field(doc, "games", o.games, "");
  read_field(doc, "workers", o.workers, "");
  read_field(doc, "out", o.out, "");
  read_field(doc, "interval", o.interval, "");
  if (doc.contains("step_limit")) {
    int v = 0;
    read_field(doc, "step_limit", v, "");
    o.step_limit = v;
  }
  if (doc.contains("planner")) {
    const json& p = doc["planner"];
    check_keys(p, {"iterations", "depth", "c", "alpha", "beta", "value"}, "planner.");
    read_field(p, "iterations", o.iterations, "planner.");
    read_field(p, "depth", o.depth, "planner.");
    read_field(p, "c", o.c, "planner.");
    read_field(p, "alpha", o.alpha, "planner.");
    read_field(p, "beta", o.beta, "planner.");
    read_field(p, "value", o.value, "planner.");
  }
  if (doc.contains("tournament")) {
    const json& t = doc["tournament"];
    check_keys(t, {"seat0", "opponents", "agents", "planner_stats"}, "tournament.");
    read_field(t, "seat0", o.seat0, "tournament.");
    read_field(t, "opponents", o.opponents, "tournament.");
    read_field(t, "agents", o.agents, "tournament.");
    read_field(t, "planner_stats", o.planner_stats, "tournament.");
  }
  if (doc.contains("pair")) {
    const json& p = doc["pair"];
    check_keys(p, {"a", "b"}, "pair.");
    read_field(p, "a", o.a, "pair.");
    read_field(p, "b", o.b, "pair.");
  }
  if (doc.contains("follower")) {
    const json& f = doc["follower"];
    check_keys(f, {"episodes", "grad_steps", "batch", "learning_rate", "hidden", "buffer", "mode", "oracle",
                   "eval_games", "checkpoint"},
               "follower.");
    read_field(f, "episodes", o.episodes, "follower.");
    read_field(f, "grad_steps", o.grad_steps, "follower.");
    read_field(f, "batch", o.batch, "follower.");
    read_field(f, "learning_rate", o.lr, "follower.");
    read_field(f, "hidden", o.hidden, "follower.");
    read_field(f, "buffer", o.buffer, "follower.");
    read_field(f, "mode", o.mode, "follower.");
    read_field(f, "oracle", o.oracle, "follower.");
    read_field(f, "eval_games", o.eval_games, "follower.");
    read_field(f, "checkpoint", o.checkpoint, "follower.");
  }
  if (doc.contains("revisits")) {
    const json& r = doc["revisits"];
    check_keys(r, {"planners"}, "revisits.");
    read_field(r, "planners", o.planners, "revisits.");
  }
}

std::optional<std::string> find_config_arg(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

// --- shared option plumbing ------------------------------------------------

void add_common(CLI::App& cmd, Options& o) {
  cmd.add_option("--config", "JSON run configuration; flags override its values");
  cmd.add_option("--env", o.env, "gridarena | gridarena2p | matrix:<file>");
  cmd.add_option("--profile", o.profile, "full (800-step episodes) | fast (200-step episodes)")
      ->check(CLI::IsMember({"full", "fast"}));
  cmd.add_option("--seed", o.seed, "Base seed");
  cmd.add_option("--workers", o.workers, "Parallel games (0: all cores; SIMULPLAN_WORKERS overrides)");
  cmd.add_option("--out", o.out, "Output directory");
  cmd.add_option("--step-limit", o.step_limit, "Override the episode step limit");
}

void add_planner(CLI::App& cmd, Options& o) {
  cmd.add_option("--iterations", o.iterations, "Planning iterations per step");
  cmd.add_option("--depth", o.depth, "Planning depth k");
  cmd.add_option("--c", o.c, "UCB1 exploration constant");
  cmd.add_option("--alpha", o.alpha, "Thompson prior alpha");
  cmd.add_option("--beta", o.beta, "Thompson prior beta");
  cmd.add_option("--value", o.value, "Value function: reward | terminal");
}

PlannerConfig planner_defaults(const Options& o) {
  PlannerConfig p;
  p.iterations = o.iterations;
  p.depth = o.depth;
  p.bandit.c = static_cast<float>(o.c);
  p.bandit.alpha = static_cast<float>(o.alpha);
  p.bandit.beta = static_cast<float>(o.beta);
  p.value = parse_value_function(o.value);
  p.validate();
  return p;
}

grid::GridConfig grid_config(const Options& o) {
  grid::GridConfig g = harness::grid_env_config(o.env);
  g.step_limit = o.step_limit ? *o.step_limit : (o.profile == "fast" ? 200 : 800);
  g.validate();
  return g;
}

std::string command_line(const std::string& name, const std::vector<std::string>& args) {
  std::string out = "simulplan";
  (void)name;
  for (const std::string& a : args) out += " " + a;
  return out;
}

void require_games(int games, const char* flag) {
  if (games < 1) throw ConfigError(std::string(flag) + " must be >= 1");
}

// --- subcommands -------------------------------------------------------------

harness::TournamentResult tournament_on(const Options& o, std::vector<std::string> agents, int games,
                                        bool stats) {
  harness::TournamentConfig tc;
  tc.env = o.env;
  tc.agents = std::move(agents);
  tc.games = games;
  tc.seed = o.seed;
  tc.workers = o.workers;
  tc.collect_stats = stats;
  tc.interval = harness::parse_interval_kind(o.interval);
  std::optional<grid::GridConfig> g;
  if (harness::is_grid_env(o.env)) g = grid_config(o);
  const PlannerConfig pd = planner_defaults(o);
  // Validate every spec before any game runs.
  for (const std::string& a : tc.agents) (void)harness::parse_agent_spec(a, pd);
  return harness::run_named_tournament(tc, g, pd);
}

int cmd_tournament(const Options& o, const std::string& cmdline, std::ostream& out) {
  require_games(o.games, "--games");
  std::vector<std::string> agents = o.agents;
  if (agents.empty()) {
    int n = 4;
    if (harness::is_grid_env(o.env)) n = grid_config(o).num_players;
    if (o.env.rfind("matrix:", 0) == 0) n = matrix::MatrixGame::load(o.env.substr(7)).num_players();
    agents.push_back(o.seat0);
    for (int i = 1; i < n; ++i) agents.push_back(o.opponents);
  }
  const harness::TournamentResult r = tournament_on(o, agents, o.games, o.planner_stats);
  harness::write_tournament_outputs(r, o.out, cmdline);
  out << harness::summary_table(r);
  return kExitOk;
}

int cmd_pair(const Options& o, const std::string& cmdline, std::ostream& out) {
  require_games(o.games, "--games");
  if (o.a.empty() || o.b.empty()) throw ConfigError("pair needs --a and --b");
  const harness::TournamentResult r = tournament_on(o, {o.a, o.b}, o.games, o.planner_stats);
  harness::write_tournament_outputs(r, o.out, cmdline);
  out << harness::summary_table(r);
  const harness::SlotSummary& s = r.summary[0];
  out << std::fixed << std::setprecision(1) << o.a << " vs " << o.b << ": " << 100.0 * s.score.p << " +/- "
      << 100.0 * s.score.half_width << "% (wins + draws/2 over " << s.games << " games)\n";
  return kExitOk;
}

int cmd_dagger(Options o, const std::string& cmdline, std::ostream& out) {
  if (!harness::is_grid_env(o.env)) throw ConfigError("dagger runs on grid environments only");
  if (o.eval_games < 0) throw ConfigError("--eval-games must be >= 0");
  follower::FollowerConfig fc;
  fc.mode = follower::parse_imitation_mode(o.mode);
  fc.episodes = o.episodes;
  fc.grad_steps = o.grad_steps;
  fc.batch_size = o.batch;
  fc.learning_rate = o.lr;
  fc.hidden = o.hidden;
  fc.buffer_capacity = o.buffer;
  fc.seed = o.seed;
  fc.env = grid_config(o);
  fc.oracle = parse_planner_spec(o.oracle, planner_defaults(o));
  fc.validate();

  const follower::TrainingReport report = follower::train_follower(fc, follower::initial_policy(fc));
  std::filesystem::create_directories(o.out);
  if (o.checkpoint.empty()) o.checkpoint = (std::filesystem::path(o.out) / ("follower-" + o.mode + ".bin")).string();
  follower::Checkpoint ck{report.policy, fc.seed, fc.episodes, o.mode, fc.env.height, fc.env.width};
  follower::save_checkpoint(ck, o.checkpoint);
  if (!o.export_buffer.empty()) harness::write_file(o.export_buffer, follower::export_buffer(report.buffer));
  out << "trained " << o.mode << " follower: " << fc.episodes << " episodes, " << report.buffer.total_added()
      << " samples, parameter hash " << std::hex << std::setw(16) << std::setfill('0') << report.policy.hash()
      << std::dec << std::setfill(' ') << "\n";
  out << "checkpoint " << o.checkpoint << "\n";
  if (o.eval_games == 0) return kExitOk;

  std::vector<std::string> agents{"follower:" + o.checkpoint};
  for (int i = 1; i < fc.env.num_players; ++i) agents.push_back(o.opponents);
  const harness::TournamentResult r = tournament_on(o, agents, o.eval_games, false);
  harness::write_tournament_outputs(r, o.out, cmdline);
  out << harness::summary_table(r);
  return kExitOk;
}

int cmd_revisits(const Options& o, std::ostream& out) {
  require_games(o.games, "--games");
  if (!harness::is_grid_env(o.env)) throw ConfigError("revisits runs on grid environments only");
  const PlannerConfig pd = planner_defaults(o);
  for (const std::string& p : o.planners) (void)parse_planner_spec(p, pd);
  const harness::RevisitStudy study = harness::run_revisit_study(o.planners, o.games, o.seed, grid_config(o),
                                                                 o.workers, pd);
  std::filesystem::create_directories(o.out);
  harness::write_file((std::filesystem::path(o.out) / "revisits.csv").string(), harness::revisits_csv(study.rows));
  out << "mean smoothed revisit ratio (decay " << harness::kRevisitDecay << ")\n";
  out << std::left << std::setw(20) << "planner" << std::right;
  for (int d : {1, 5, 10, 15, 20}) out << std::setw(9) << ("d=" + std::to_string(d));
  out << "\n";
  for (const std::string& p : study.planners) {
    out << std::left << std::setw(20) << p << std::right << std::fixed << std::setprecision(3);
    for (int d : {1, 5, 10, 15, 20}) out << std::setw(9) << harness::mean_smoothed(study.rows, p, d);
    out << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  try {
    if (auto path = find_config_arg(args)) apply_config(*path, o);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"Simultaneous-move game planning toolkit", "simulplan"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // Each subcommand has its own defaults; a config file or flag replaces them.
  Options tour = o;
  if (tour.env.empty()) tour.env = "gridarena";
  if (tour.games == 0) tour.games = 400;
  auto* t = app.add_subcommand("tournament", "One configured agent against fixed opponents, seats rotated");
  add_common(*t, tour);
  add_planner(*t, tour);
  t->add_option("--games", tour.games, "Number of games");
  t->add_option("--seat0", tour.seat0, "Agent under test");
  t->add_option("--opponents", tour.opponents, "Agent in every other seat");
  t->add_option("--agents", tour.agents, "Explicit agent per slot (overrides --seat0/--opponents)")->delimiter(',');
  t->add_option("--interval", tour.interval, "normal | wilson");
  t->add_flag("--planner-stats", tour.planner_stats, "Write planner_stats.csv");

  Options pair = o;
  if (pair.env.empty()) pair.env = "gridarena2p";
  if (pair.games == 0) pair.games = 200;
  auto* p = app.add_subcommand("pair", "Head-to-head between two agents on a two-player environment");
  add_common(*p, pair);
  add_planner(*p, pair);
  p->add_option("--games", pair.games, "Number of games");
  p->add_option("--a", pair.a, "First agent (reported)");
  p->add_option("--b", pair.b, "Second agent");
  p->add_option("--interval", pair.interval, "normal | wilson");
  p->add_flag("--planner-stats", pair.planner_stats, "Write planner_stats.csv");

  Options dag = o;
  if (dag.env.empty()) dag.env = "gridarena";
  auto* d = app.add_subcommand("dagger", "Train a follower by imitating the oracle planner, then evaluate it");
  add_common(*d, dag);
  add_planner(*d, dag);
  d->add_option("--episodes", dag.episodes, "Training episodes");
  d->add_option("--grad-steps", dag.grad_steps, "Gradient steps per episode");
  d->add_option("--batch", dag.batch, "Minibatch size");
  d->add_option("--lr", dag.lr, "Adam learning rate");
  d->add_option("--hidden", dag.hidden, "Hidden layer width (0: affine)");
  d->add_option("--buffer", dag.buffer, "Replay buffer capacity");
  d->add_option("--mode", dag.mode, "dagger | bc");
  d->add_option("--oracle", dag.oracle, "Oracle planner spec");
  d->add_option("--eval-games", dag.eval_games, "Evaluation games against --opponents (0: skip)");
  d->add_option("--opponents", dag.opponents, "Evaluation opponents");
  d->add_option("--checkpoint", dag.checkpoint, "Checkpoint path (default <out>/follower-<mode>.bin)");
  d->add_option("--export-buffer", dag.export_buffer, "Write the replay buffer as text");
  d->add_option("--interval", dag.interval, "normal | wilson");

  Options rev = o;
  if (rev.env.empty()) rev.env = "gridarena";
  if (rev.games == 0) rev.games = 1;
  auto* r = app.add_subcommand("revisits", "Per-depth revisit ratios of instrumented planner games");
  add_common(*r, rev);
  add_planner(*r, rev);
  r->add_option("--games", rev.games, "Instrumented games per planner");
  r->add_option("--planners", rev.planners, "Planner specs")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const std::string cmdline = command_line(app.get_subcommands().front()->get_name(), args);
  try {
    if (t->parsed()) return cmd_tournament(tour, cmdline, out);
    if (p->parsed()) return cmd_pair(pair, cmdline, out);
    if (d->parsed()) return cmd_dagger(dag, cmdline, out);
    if (r->parsed()) return cmd_revisits(rev, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace simulplan::cli
