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

#include "simulplan/matrix_game.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>
#include "simulplan/hash.hpp"

namespace simulplan::matrix {
namespace {

int sign(int x) { return (x > 0) - (x < 0); }

void check_reward(int r) {
  if (r < -1 || r > 1) throw ConfigError("matrix game payoffs must lie in {-1, 0, +1}");
}

}  // namespace

MatrixGame::MatrixGame(std::string name, std::vector<int> num_actions,
                       std::vector<std::array<int, kMaxPlayers>> payoffs, int horizon)
    : name_(std::move(name)),
      num_actions_(std::move(num_actions)),
      payoffs_(std::move(payoffs)),
      horizon_(horizon) {
  if (num_actions_.size() < 2 || num_actions_.size() > static_cast<std::size_t>(kMaxPlayers)) {
    throw ConfigError("matrix game needs between 2 and " + std::to_string(kMaxPlayers) + " players");
  }
  std::size_t joint = 1;
  for (int n : num_actions_) {
    if (n < 1 || n > kMaxActions) {
      throw ConfigError("matrix game action count must be in [1, " + std::to_string(kMaxActions) + "]");
    }
    joint *= static_cast<std::size_t>(n);
  }
  if (payoffs_.size() != joint) {
    throw ConfigError("payoff tensor has " + std::to_string(payoffs_.size()) +
                      " entries, expected " + std::to_string(joint));
  }
  if (horizon_ < 1) throw ConfigError("matrix game horizon must be >= 1");
  for (const auto& entry : payoffs_) {
    for (int p = 0; p < num_players(); ++p) check_reward(entry[static_cast<std::size_t>(p)]);
    if (num_players() == 2 && entry[0] != -entry[1]) {
      throw ConfigError("two-player matrix games must be zero-sum");
    }
  }
}

MatrixGame MatrixGame::zero_sum(std::string name, const std::vector<std::vector<int>>& row_payoff,
                                int horizon) {
  if (row_payoff.empty() || row_payoff.front().empty()) {
    throw ConfigError("empty payoff matrix");
  }
  const int rows = static_cast<int>(row_payoff.size());
  const int cols = static_cast<int>(row_payoff.front().size());
  std::vector<std::array<int, kMaxPlayers>> payoffs;
  payoffs.reserve(static_cast<std::size_t>(rows * cols));
  for (const auto& row : row_payoff) {
    if (static_cast<int>(row.size()) != cols) throw ConfigError("ragged payoff matrix");
    for (int r : row) payoffs.push_back({r, -r, 0, 0});
  }
  return MatrixGame(std::move(name), {rows, cols}, std::move(payoffs), horizon);
}

MatrixGame MatrixGame::from_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("matrix game: ") + e.what());
  }
  try {
    const std::string name = doc.value("name", std::string("matrix"));
    const int horizon = doc.value("horizon", 1);
    if (doc.contains("payoff")) {
      auto matrix = doc.at("payoff").get<std::vector<std::vector<int>>>();
      return zero_sum(name, matrix, horizon);
    }
    auto num_actions = doc.at("num_actions").get<std::vector<int>>();
    std::vector<std::array<int, kMaxPlayers>> payoffs;
    for (const auto& entry : doc.at("payoffs")) {
      auto rewards = entry.get<std::vector<int>>();
      if (rewards.size() != num_actions.size()) {
        throw ConfigError("each payoffs entry needs one reward per player");
      }
      std::array<int, kMaxPlayers> r{};
      for (std::size_t p = 0; p < rewards.size(); ++p) r[p] = rewards[p];
      payoffs.push_back(r);
    }
    return MatrixGame(name, std::move(num_actions), std::move(payoffs), horizon);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("matrix game: ") + e.what());
  }
}

MatrixGame MatrixGame::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix game file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

int MatrixGame::joint_index(const JointAction& joint) const {
  int index = 0;
  for (int p = 0; p < num_players(); ++p) {
    const int a = joint[p].id;
    if (a >= num_actions_[static_cast<std::size_t>(p)]) {
      throw ContractError("illegal action " + std::to_string(a) + " for " + to_string(PlayerId{p}));
    }
    index = index * num_actions_[static_cast<std::size_t>(p)] + a;
  }
  return index;
}

JointAction MatrixGame::joint_from_index(int index) const {
  JointAction joint(num_players());
  for (int p = num_players() - 1; p >= 0; --p) {
    const int n = num_actions_[static_cast<std::size_t>(p)];
    joint[p] = Action{static_cast<std::uint8_t>(index % n)};
    index /= n;
  }
  return joint;
}

MatrixState::MatrixState(std::shared_ptr<const MatrixGame> game) : game_(std::move(game)) {}

ActionList MatrixState::legal_actions(PlayerId p) const {
  if (is_terminal()) throw ContractError("legal_actions queried on a terminal matrix state");
  ActionList actions;
  for (int a = 0; a < game_->num_actions(p); ++a) actions.push_back(Action{static_cast<std::uint8_t>(a)});
  return actions;
}

MatrixState MatrixState::step(const JointAction& joint) const {
  if (is_terminal()) throw ContractError("step called on a terminal matrix state");
  if (joint.size() != num_players()) throw ContractError("joint action has the wrong number of slots");
  MatrixState next = *this;
  const int j = game_->joint_index(joint);
  for (int p = 0; p < num_players(); ++p) {
    next.cumulative_[static_cast<std::size_t>(p)] += game_->payoff(j, PlayerId{p});
  }
  ++next.round_;
  return next;
}

int MatrixState::terminal_reward(PlayerId p) const {
  if (!is_terminal()) throw ContractError("terminal_reward queried on a non-terminal matrix state");
  return sign(cumulative(p));
}

double MatrixState::heuristic_value(PlayerId p) const { return sign(cumulative(p)); }

std::string MatrixState::serialize() const {
  std::string out;
  out.reserve(4 + 4 * kMaxPlayers);
  auto put = [&out](std::int32_t v) { out.append(reinterpret_cast<const char*>(&v), sizeof v); };
  put(round_);
  for (int p = 0; p < num_players(); ++p) put(cumulative_[static_cast<std::size_t>(p)]);
  return out;
}

StateKey MatrixState::canonical_key() const { return StateKey{hash_bytes(serialize(), 0x4D41)}; }

OpponentPolicy uniform_policy(const MatrixGame& game) {
  OpponentPolicy policy;
  for (int p = 0; p < game.num_players(); ++p) {
    const int n = game.num_actions(PlayerId{p});
    policy.emplace_back(static_cast<std::size_t>(n), 1.0 / n);
  }
  return policy;
}

namespace {

// Expected sign outcome for `player` from round `round` onwards, with
// `player` uniform and the opponents following `policy`.
double future_value(const MatrixGame& game, PlayerId player, const OpponentPolicy& policy,
                    int round, int cumulative) {
  if (round >= game.horizon()) return sign(cumulative);
  double total = 0.0;
  for (int j = 0; j < game.num_joint_actions(); ++j) {
    const JointAction joint = game.joint_from_index(j);
    double w = 1.0;
    for (int p = 0; p < game.num_players(); ++p) {
      w *= (p == player.index) ? 1.0 / game.num_actions(player)
                               : policy[static_cast<std::size_t>(p)][joint[p].id];
    }
    if (w == 0.0) continue;
    total += w * future_value(game, player, policy, round + 1, cumulative + game.payoff(j, player));
  }
  return total;
}

}  // namespace

std::vector<double> brute_force_q(const MatrixGame& game, PlayerId player,
                                  const OpponentPolicy& opponent_policy) {
  if (player.index < 0 || player.index >= game.num_players()) {
    throw ContractError("brute_force_q: unknown " + to_string(player));
  }
  if (static_cast<int>(opponent_policy.size()) != game.num_players()) {
    throw ContractError("opponent policy needs one entry per player");
  }
  for (int p = 0; p < game.num_players(); ++p) {
    if (p == player.index) continue;
    const auto& dist = opponent_policy[static_cast<std::size_t>(p)];
    if (static_cast<int>(dist.size()) != game.num_actions(PlayerId{p})) {
      throw ContractError("opponent policy of " + to_string(PlayerId{p}) + " has the wrong size");
    }
    double sum = 0.0;
    for (double x : dist) {
      if (!(x >= 0.0)) throw ContractError("opponent policy has a negative probability");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ContractError("opponent policy of " + to_string(PlayerId{p}) + " does not sum to 1");
    }
  }

  std::vector<double> q(static_cast<std::size_t>(game.num_actions(player)), 0.0);
  for (int j = 0; j < game.num_joint_actions(); ++j) {
    const JointAction joint = game.joint_from_index(j);
    double w = 1.0;
    for (int p = 0; p < game.num_players(); ++p) {
      if (p != player.index) w *= opponent_policy[static_cast<std::size_t>(p)][joint[p].id];
    }
    if (w == 0.0) continue;
    q[joint[player].id] += w * future_value(game, player, opponent_policy, 1, game.payoff(j, player));
  }
  return q;
}

MatrixGame rock_paper_scissors() {
  return MatrixGame::zero_sum("rps", {{0, -1, 1}, {1, 0, -1}, {-1, 1, 0}});
}

MatrixGame matching_pennies() { return MatrixGame::zero_sum("pennies", {{1, -1}, {-1, 1}}); }

MatrixGame dominance_game() {
  return MatrixGame::zero_sum("dominance", {{1, 0, 1}, {0, -1, 0}, {-1, -1, -1}});
}

MatrixGame skewed_game() {
  return MatrixGame::zero_sum("skewed",
                              {{1, -1, 1, 0}, {0, 0, 0, 0}, {-1, 1, -1, 1}, {1, 1, -1, -1}});
}

}  // namespace simulplan::matrix
