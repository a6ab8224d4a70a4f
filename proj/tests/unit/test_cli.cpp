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

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "cli.hpp"
#include <nlohmann/json.hpp>

namespace simulplan::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("simulplan-cli-" + name);
  fs::remove_all(p);
  return p;
}

const std::vector<std::string> kQuick{"--profile", "fast", "--iterations", "5", "--depth", "3", "--workers", "1"};

std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail = kQuick) {
  head.insert(head.end(), tail.begin(), tail.end());
  return head;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"launch"}).code, kExitUsage);
  EXPECT_EQ(cli(with({"tournament", "--games", "0"})).code, kExitUsage);
  EXPECT_EQ(cli(with({"tournament", "--games", "-3"})).code, kExitUsage);
  EXPECT_EQ(cli(with({"pair", "--a", "alphazero", "--b", "rule", "--games", "2"})).code, kExitUsage);
  EXPECT_EQ(cli(with({"tournament", "--seat0", "fdts-ts:iters=0", "--games", "1"})).code, kExitUsage);
  EXPECT_EQ(cli(with({"tournament", "--profile", "slow"}, {})).code, kExitUsage);
  EXPECT_EQ(cli(with({"tournament", "--env", "chess", "--games", "1"})).code, kExitUsage);
  EXPECT_EQ(cli(with({"tournament", "--bogus-flag"})).code, kExitUsage);
  const Result r = cli(with({"pair", "--a", "alphazero", "--b", "rule", "--games", "2"}));
  EXPECT_NE(r.err.find("alphazero"), std::string::npos) << r.err;
}

TEST(Cli, HelpExitsZero) {
  const Result r = cli({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("tournament"), std::string::npos);
  EXPECT_EQ(cli({"dagger", "--help"}).code, kExitOk);
}

TEST(Cli, ConfigErrorsReportLocation) {
  const fs::path dir = scratch("config");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "broken.json") << "{\n  \"seed\": 3,\n  \"games\": ,\n}\n";
    std::ofstream(dir / "unknown.json") << R"({"seeds": 3})";
    std::ofstream(dir / "type.json") << R"({"planner": {"iterations": "many"}})";
  }
  const Result broken = cli({"tournament", "--config", (dir / "broken.json").string()});
  EXPECT_EQ(broken.code, kExitUsage);
  EXPECT_NE(broken.err.find("line 3"), std::string::npos) << broken.err;
  EXPECT_NE(broken.err.find("column"), std::string::npos) << broken.err;
  const Result unknown = cli({"tournament", "--config", (dir / "unknown.json").string()});
  EXPECT_EQ(unknown.code, kExitUsage);
  EXPECT_NE(unknown.err.find("seeds"), std::string::npos) << unknown.err;
  EXPECT_EQ(cli({"tournament", "--config", (dir / "type.json").string()}).code, kExitUsage);
  EXPECT_EQ(cli({"tournament", "--config", (dir / "missing.json").string()}).code, kExitUsage);
  fs::remove_all(dir);
}

TEST(Cli, TournamentIsReproducible) {
  const fs::path a = scratch("repro-a");
  const fs::path b = scratch("repro-b");
  for (const fs::path& dir : {a, b}) {
    const Result r = cli(with({"tournament", "--games", "4", "--seed", "7", "--seat0", "mcts-ts", "--out", dir.string(),
                               "--planner-stats"}));
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  EXPECT_EQ(slurp(a / "matches.csv"), slurp(b / "matches.csv"));
  EXPECT_EQ(slurp(a / "planner_stats.csv"), slurp(b / "planner_stats.csv"));
  const auto ja = nlohmann::json::parse(slurp(a / "summary.json"));
  const auto jb = nlohmann::json::parse(slurp(b / "summary.json"));
  EXPECT_EQ(ja.at("results"), jb.at("results"));
  EXPECT_EQ(ja.at("results").at("seed"), 7);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, ConfigFileAndFlagsAgree) {
  const fs::path dir = scratch("config-flags");
  fs::create_directories(dir);
  std::ofstream(dir / "run.json") << R"({"seed": 7, "games": 2, "profile": "fast", "workers": 1,
    "planner": {"iterations": 5, "depth": 3}, "tournament": {"seat0": "mcs-ucb"}})";
  ASSERT_EQ(cli({"tournament", "--config", (dir / "run.json").string(), "--out", (dir / "a").string()}).code, kExitOk);
  ASSERT_EQ(cli(with({"tournament", "--seed", "7", "--games", "2", "--seat0", "mcs-ucb", "--out", (dir / "b").string()}))
                .code,
            kExitOk);
  EXPECT_EQ(slurp(dir / "a" / "matches.csv"), slurp(dir / "b" / "matches.csv"));
  // Flags win over the file.
  ASSERT_EQ(cli({"tournament", "--config", (dir / "run.json").string(), "--games", "3", "--out", (dir / "c").string()})
                .code,
            kExitOk);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "c" / "summary.json")).at("results").at("games"), 3);
  fs::remove_all(dir);
}

TEST(Cli, PairReportsRate) {
  const fs::path dir = scratch("pair");
  const Result r = cli(with({"pair", "--a", "rule", "--b", "random", "--games", "4", "--out", dir.string()}));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("rule vs random: "), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("+/-"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, DaggerModesDiffer) {
  const fs::path dir = scratch("dagger");
  auto train = [&](const std::string& mode) {
    const Result r = cli(with({"dagger", "--episodes", "1", "--grad-steps", "3", "--step-limit", "20", "--hidden", "4",
                               "--mode", mode, "--eval-games", "0", "--out", dir.string(), "--oracle",
                               "fdts-ts:iters=5,depth=3"}));
    EXPECT_EQ(r.code, kExitOk) << r.err;
    const auto at = r.out.find("parameter hash ");
    EXPECT_NE(at, std::string::npos);
    return r.out.substr(at + 15, 16);
  };
  const std::string d = train("dagger");
  const std::string b = train("bc");
  EXPECT_NE(d, b);
  EXPECT_EQ(d, train("dagger"));
  EXPECT_TRUE(fs::exists(dir / "follower-dagger.bin"));
  EXPECT_TRUE(fs::exists(dir / "follower-bc.bin"));
  EXPECT_EQ(cli(with({"dagger", "--mode", "rl", "--out", dir.string()})).code, kExitUsage);
  fs::remove_all(dir);
}

TEST(Cli, DaggerZeroGradStepsThenEvaluate) {
  const fs::path dir = scratch("dagger-eval");
  const Result r = cli(with({"dagger", "--episodes", "1", "--grad-steps", "0", "--step-limit", "10", "--hidden", "0",
                             "--eval-games", "4", "--out", dir.string(), "--oracle", "fdts-ts:iters=3,depth=2",
                             "--export-buffer", (dir / "buffer.txt").string()}));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "matches.csv"));
  EXPECT_TRUE(fs::exists(dir / "buffer.txt"));
  fs::remove_all(dir);
}

TEST(Cli, RevisitsWritesCsv) {
  const fs::path dir = scratch("revisits");
  const Result r = cli(with({"revisits", "--planners", "fdts-ts,mcts-ts", "--step-limit", "8", "--out", dir.string()}));
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "revisits.csv"));
  EXPECT_NE(r.out.find("fdts-ts"), std::string::npos);
  EXPECT_NE(r.out.find("mcts-ts"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, BinaryExitStatus) {
  const std::string bin = SIMULPLAN_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status(bin + " --help"), 0);
  EXPECT_EQ(status(bin + " tournament --games 0"), 2);
  EXPECT_EQ(status(bin + " pair --a nonsense"), 2);
}

TEST(Cli, ShippedConfigsRun) {
  const fs::path configs = fs::path(SIMULPLAN_SOURCE_DIR) / "configs";
  const fs::path dir = scratch("shipped");
  auto run_config = [&](const std::string& cmd, const std::string& file, std::vector<std::string> extra) {
    std::vector<std::string> args{cmd, "--config", (configs / file).string(), "--out", (dir / file).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    const Result r = cli(with(args));
    EXPECT_EQ(r.code, kExitOk) << file << ": " << r.err;
  };
  run_config("tournament", "planner_ordering.json", {"--games", "1"});
  run_config("pair", "ts_vs_ucb.json", {"--games", "1"});
  run_config("dagger", "dagger.json", {"--episodes", "1", "--grad-steps", "1", "--eval-games", "1"});
  run_config("revisits", "revisits.json", {"--games", "1"});

  const std::vector<std::pair<std::string, std::string>> matrices{
      {"rps.json", "mcs-ts,random"}, {"dominance.json", "fdts-ucb,mcts-ts"}, {"three_player.json", "mcs-ts,random,random"}};
  for (const auto& [file, agents] : matrices) {
    const Result r = cli(with({"tournament", "--env", "matrix:" + (configs / "matrix" / file).string(), "--agents",
                               agents, "--games", "3", "--out", (dir / file).string()}));
    EXPECT_EQ(r.code, kExitOk) << file << ": " << r.err;
  }
}

}  // namespace
}  // namespace simulplan::cli
