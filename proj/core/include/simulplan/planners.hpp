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

#ifndef SIMULPLAN_PLANNERS_HPP_
#define SIMULPLAN_PLANNERS_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "simulplan/bandits.hpp"
#include "simulplan/game.hpp"
#include "simulplan/rng.hpp"
#include "simulplan/search_tree.hpp"
#include "simulplan/types.hpp"

namespace simulplan {

enum class Algorithm : std::uint8_t { kMcs, kMcts, kFdts };

enum class ValueFunction : std::uint8_t {
  kReward,    // environment reward function on any state
  kTerminal,  // terminal reward, 0 elsewhere
};

/// Throws ConfigError for unknown ids. Known ids: "reward", "terminal".
ValueFunction parse_value_function(const std::string& id);
std::string to_string(ValueFunction v);

struct PlannerConfig {
  Algorithm algorithm = Algorithm::kFdts;
  BanditSpec bandit = BanditSpec::thompson();
  int iterations = 100;
  /// Planning horizon k: rollout length for MCS, total depth for MCTS, tree
  /// descent length for FDTS.
  int depth = 20;
  /// MCTS only: continue with random moves after expansion up to `depth`.
  bool rollouts = true;
  ValueFunction value = ValueFunction::kReward;
  /// Sample the final action instead of taking the deterministic best.
  bool stochastic_final = false;
  std::uint64_t seed = 0;

  void validate() const;
  /// Short spec-style name, e.g. "fdts-ts", "mcts-ucb-norollout".
  std::string name() const;
};

/// Parses "<mcs|mcts|fdts>-<ts|ucb|random>[-norollout]" with optional
/// ":key=value,..." overrides (c, alpha, beta, iters, depth, value). Throws
/// ConfigError on anything else.
PlannerConfig parse_planner_spec(const std::string& spec, const PlannerConfig& defaults = {});

template <GameState S>
Value evaluate_state(const S& state, ValueFunction fn) {
  const int n = state.num_players();
  Value v(n);
  for (int p = 0; p < n; ++p) {
    if (state.is_terminal()) {
      v[p] = state.terminal_reward(PlayerId{p});
    } else {
      v[p] = fn == ValueFunction::kReward ? static_cast<double>(state.heuristic_value(PlayerId{p})) : 0.0;
    }
  }
  return v;
}

/// Independent RNG streams: one per player for bandit selection (so one
/// player's selections never depend on another player's statistics) and one
/// for rollouts.
struct PlannerStreams {
  std::array<Rng, kMaxPlayers> selection;
  Rng rollout;

  static PlannerStreams derive(std::uint64_t seed, StateKey root) {
    PlannerStreams s;
    for (int p = 0; p < kMaxPlayers; ++p) {
      s.selection[static_cast<std::size_t>(p)] =
          make_rng(seed, {root.hash, 0x53454C00ULL + static_cast<std::uint64_t>(p)});
    }
    s.rollout = make_rng(seed, {root.hash, 0x524F4C4CULL});
    return s;
  }
};

namespace detail {

template <GameState S>
JointAction select_joint(const S& state, const DecoupledNode& node, PlannerStreams& rng) {
  const int n = state.num_players();
  JointAction joint(n);
  for (int p = 0; p < n; ++p) {
    const BanditInstance& bandit = node.bandits[static_cast<std::size_t>(p)];
    if (!bandit.empty()) joint[p] = select_action(bandit, rng.selection[static_cast<std::size_t>(p)]);
  }
  return joint;
}

template <GameState S>
JointAction random_joint(const S& state, Rng& rng) {
  const int n = state.num_players();
  JointAction joint(n);
  for (int p = 0; p < n; ++p) {
    if (!state.is_acting(PlayerId{p})) continue;
    const ActionList legal = state.legal_actions(PlayerId{p});
    joint[p] = legal[static_cast<std::size_t>(uniform_index(rng, static_cast<int>(legal.size())))];
  }
  return joint;
}

using Path = std::vector<std::pair<DecoupledNode*, JointAction>>;

inline void backup(const Path& path, const Value& value) {
  for (const auto& [node, joint] : path) {
    for (std::size_t p = 0; p < node->bandits.size(); ++p) {
      BanditInstance& bandit = node->bandits[p];
      if (!bandit.empty()) update(bandit, joint[static_cast<int>(p)], value[static_cast<int>(p)]);
    }
  }
}

template <GameState S>
JointAction final_joint(const S& root_state, const DecoupledNode& root, const PlannerConfig& config,
                        PlannerStreams& rng) {
  JointAction joint(root_state.num_players());
  for (std::size_t p = 0; p < root.bandits.size(); ++p) {
    const BanditInstance& bandit = root.bandits[p];
    if (bandit.empty()) continue;
    joint[static_cast<int>(p)] = config.stochastic_final ? sample_final_action(bandit, rng.selection[p])
                                                         : best_action(bandit);
  }
  return joint;
}

template <GameState S>
void require_plannable(const S& root_state, const PlannerConfig& config) {
  config.validate();
  if (root_state.is_terminal()) throw ContractError("planning from a terminal state");
}

inline void count_visit(SearchTree& tree, int depth, bool created) {
  auto& c = tree.counters();
  const auto d = static_cast<std::size_t>(depth);
  c.visits[d] += 1;
  if (created) {
    c.created[d] += 1;
  } else {
    c.revisits[d] += 1;
  }
}

}  // namespace detail

/// Moves the tree's root to `new_state`, creating its node if needed.
/// Statistics collected for the state earlier in the episode are kept.
template <GameState S>
void advance_root(SearchTree& tree, const S& new_state) {
  const StateKey key = new_state.canonical_key();
  tree.set_root(key);
  tree.ensure(new_state, key);
}

/// Monte Carlo search: bandit selection at the root only, uniformly random
/// moves for the remaining k-1 steps, root statistics rebuilt every call.
template <GameState S>
JointAction plan_mcs(SearchTree& tree, const S& root_state, const PlannerConfig& config) {
  detail::require_plannable(root_state, config);
  tree.clear();
  advance_root(tree, root_state);
  tree.counters().reset(config.depth);
  DecoupledNode& root = *tree.find(tree.root());
  PlannerStreams rng = PlannerStreams::derive(config.seed, tree.root());

  detail::Path path;
  for (int it = 0; it < config.iterations; ++it) {
    const JointAction first = detail::select_joint(root_state, root, rng);
    S state = root_state.step(first);
    for (int d = 1; d < config.depth && !state.is_terminal(); ++d) {
      state = state.step(detail::random_joint(state, rng.rollout));
    }
    path.assign(1, {&root, first});
    detail::backup(path, evaluate_state(state, config.value));
  }
  return detail::final_joint(root_state, root, config, rng);
}

/// Decoupled MCTS: descend with the bandits until a state not in the tree,
/// add exactly one node for it, optionally roll out uniformly up to total
/// depth k, evaluate and back up along the selection path.
template <GameState S>
JointAction plan_mcts(SearchTree& tree, const S& root_state, const PlannerConfig& config) {
  detail::require_plannable(root_state, config);
  advance_root(tree, root_state);
  tree.counters().reset(config.depth);
  DecoupledNode& root = *tree.find(tree.root());
  PlannerStreams rng = PlannerStreams::derive(config.seed, tree.root());

  detail::Path path;
  path.reserve(static_cast<std::size_t>(config.depth));
  for (int it = 0; it < config.iterations; ++it) {
    path.clear();
    S state = root_state;
    DecoupledNode* node = &root;
    int depth = 0;
    DecoupledNode* expanded = nullptr;
    while (!state.is_terminal() && depth < config.depth) {
      const JointAction joint = detail::select_joint(state, *node, rng);
      path.emplace_back(node, joint);
      state = state.step(joint);
      ++depth;
      bool created = false;
      node = &tree.ensure(state, state.canonical_key(), &created, depth);
      detail::count_visit(tree, depth, created);
      if (created) {
        expanded = node;
        break;
      }
    }
    if (expanded != nullptr && config.rollouts && !state.is_terminal() && depth < config.depth) {
      // The new node chooses the first rollout move and is credited with it;
      // at a fresh node this is distributed uniformly for every bandit.
      const JointAction joint = detail::select_joint(state, *expanded, rng);
      path.emplace_back(expanded, joint);
      state = state.step(joint);
      ++depth;
      while (!state.is_terminal() && depth < config.depth) {
        state = state.step(detail::random_joint(state, rng.rollout));
        ++depth;
      }
    }
    detail::backup(path, evaluate_state(state, config.value));
  }
  return detail::final_joint(root_state, root, config, rng);
}

/// Fixed-depth tree search: apply the bandit tree policy exactly k times
/// (stopping early only at terminal states), inserting every novel state,
/// then evaluate the reached state and back up into every node on the path.
template <GameState S>
JointAction plan_fdts(SearchTree& tree, const S& root_state, const PlannerConfig& config) {
  detail::require_plannable(root_state, config);
  advance_root(tree, root_state);
  tree.counters().reset(config.depth);
  DecoupledNode& root = *tree.find(tree.root());
  PlannerStreams rng = PlannerStreams::derive(config.seed, tree.root());

  detail::Path path;
  path.reserve(static_cast<std::size_t>(config.depth));
  for (int it = 0; it < config.iterations; ++it) {
    path.clear();
    S state = root_state;
    DecoupledNode* node = &root;
    for (int depth = 1; depth <= config.depth; ++depth) {
      const JointAction joint = detail::select_joint(state, *node, rng);
      path.emplace_back(node, joint);
      state = state.step(joint);
      bool created = false;
      node = &tree.ensure(state, state.canonical_key(), &created, depth);
      detail::count_visit(tree, depth, created);
      if (state.is_terminal()) break;
    }
    detail::backup(path, evaluate_state(state, config.value));
  }
  return detail::final_joint(root_state, root, config, rng);
}

template <GameState S>
JointAction plan(SearchTree& tree, const S& root_state, const PlannerConfig& config) {
  switch (config.algorithm) {
    case Algorithm::kMcs:
      return plan_mcs(tree, root_state, config);
    case Algorithm::kMcts:
      return plan_mcts(tree, root_state, config);
    case Algorithm::kFdts:
      return plan_fdts(tree, root_state, config);
  }
  throw ContractError("unknown planning algorithm");
}

/// A planner that keeps its search tree across the steps of one episode.
template <GameState S>
class Planner {
 public:
  explicit Planner(PlannerConfig config) : config_(config), tree_(config.bandit) { config_.validate(); }

  const PlannerConfig& config() const { return config_; }
  SearchTree& tree() { return tree_; }
  const SearchTree& tree() const { return tree_; }

  /// Self-play planning from `state`; one action per acting player.
  JointAction plan(const S& state) { return simulplan::plan(tree_, state, config_); }

  /// Re-roots the tree at the actual successor.
  void advance(const S& next) {
    if (config_.algorithm == Algorithm::kMcs || next.is_terminal()) return;
    advance_root(tree_, next);
  }

  void reset() { tree_.clear(); }

 private:
  PlannerConfig config_;
  SearchTree tree_;
};

}  // namespace simulplan

#endif  // SIMULPLAN_PLANNERS_HPP_
