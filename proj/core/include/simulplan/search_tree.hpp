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

#ifndef SIMULPLAN_SEARCH_TREE_HPP_
#define SIMULPLAN_SEARCH_TREE_HPP_

#include <cstdint>
#include <string>
#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "simulplan/bandits.hpp"
#include "simulplan/game.hpp"
#include "simulplan/types.hpp"

namespace simulplan {

/// Independent bandits, one per player, over that player's legal actions in
/// the node's state. Players that do not act get an empty instance.
struct DecoupledNode {
  boost::container::small_vector<BanditInstance, kMaxPlayers> bandits;
  /// Last root generation from which the node can still be reached.
  std::uint64_t expires = 0;
};

template <GameState S>
DecoupledNode make_node(const S& state, const BanditSpec& spec) {
  DecoupledNode node;
  const int n = state.num_players();
  node.bandits.resize(static_cast<std::size_t>(n));
  if (state.is_terminal()) return node;
  for (int p = 0; p < n; ++p) {
    if (state.is_acting(PlayerId{p})) {
      node.bandits[static_cast<std::size_t>(p)] = BanditInstance(state.legal_actions(PlayerId{p}), spec);
    }
  }
  return node;
}

/// Per-depth instrumentation for the most recent planning call. Depth d >= 1
/// counts states reached d joint actions below the root while the planner
/// was interacting with the tree (selection and expansion, not rollouts).
struct DepthCounters {
  std::vector<std::uint64_t> visits;
  std::vector<std::uint64_t> revisits;  // visits to states already in the tree
  std::vector<std::uint64_t> created;

  void reset(int max_depth) {
    visits.assign(static_cast<std::size_t>(max_depth) + 1, 0);
    revisits.assign(static_cast<std::size_t>(max_depth) + 1, 0);
    created.assign(static_cast<std::size_t>(max_depth) + 1, 0);
  }
  int max_depth() const { return static_cast<int>(visits.size()) - 1; }
  /// Deepest depth with at least one revisit (0 when none).
  int max_revisit_depth() const {
    for (int d = max_depth(); d >= 1; --d) {
      if (revisits[static_cast<std::size_t>(d)] > 0) return d;
    }
    return 0;
  }
};

#ifdef NDEBUG
inline constexpr bool kAuditKeysByDefault = false;
#else
inline constexpr bool kAuditKeysByDefault = true;
#endif

/// Map from canonical state key to node. Transpositions share a node.
///
/// Every root change counts as one game step. A node touched `depth` steps
/// below the root lives `depth` steps in the future, so once the root has
/// moved past that point it is unreachable and `set_root` erases it.
/// This relies on keys that encode the step count (both bundled games do),
/// so a state never recurs later in the episode. References returned by
/// `ensure` stay valid until the root changes.
class SearchTree {
 public:
  explicit SearchTree(BanditSpec spec = {}, bool audit_keys = kAuditKeysByDefault)
      : spec_(spec), audit_keys_(audit_keys) {}

  const BanditSpec& spec() const { return spec_; }
  std::size_t size() const { return nodes_.size(); }
  bool contains(StateKey key) const { return nodes_.count(key) != 0; }
  DecoupledNode* find(StateKey key) {
    auto it = nodes_.find(key);
    return it == nodes_.end() ? nullptr : &it->second;
  }
  const DecoupledNode* find(StateKey key) const {
    auto it = nodes_.find(key);
    return it == nodes_.end() ? nullptr : &it->second;
  }

  /// Node for `state`, `depth` steps below the root, created if absent.
  /// `created` reports which.
  template <GameState S>
  DecoupledNode& ensure(const S& state, StateKey key, bool* created = nullptr, int depth = 0) {
    auto [it, inserted] = nodes_.try_emplace(key);
    if (inserted) it->second = make_node(state, spec_);
    if (created != nullptr) *created = inserted;
    if (audit_keys_) audit(key, state.serialize());
    it->second.expires = std::max(it->second.expires, generation_ + static_cast<std::uint64_t>(depth));
    return it->second;
  }

  StateKey root() const { return root_; }
  bool has_root() const { return has_root_; }
  std::uint64_t generation() const { return generation_; }
  void set_root(StateKey key) {
    if (has_root_ && key != root_) {
      ++generation_;
      std::erase_if(nodes_, [this](const auto& kv) { return kv.second.expires < generation_; });
      if (audit_keys_) std::erase_if(serialized_, [this](const auto& kv) { return !nodes_.contains(kv.first); });
    }
    root_ = key;
    has_root_ = true;
  }

  void clear() {
    nodes_.clear();
    serialized_.clear();
    has_root_ = false;
    generation_ = 0;
  }

  DepthCounters& counters() { return counters_; }
  const DepthCounters& counters() const { return counters_; }

 private:
  void audit(StateKey key, std::string bytes) {
    auto [it, inserted] = serialized_.try_emplace(key, std::move(bytes));
    if (!inserted && it->second != bytes) throw ContractError("state key collision detected");
  }

  BanditSpec spec_;
  bool audit_keys_;
  std::unordered_map<StateKey, DecoupledNode, StateKeyHasher> nodes_;
  std::unordered_map<StateKey, std::string, StateKeyHasher> serialized_;
  StateKey root_;
  bool has_root_ = false;
  std::uint64_t generation_ = 0;
  DepthCounters counters_;
};

}  // namespace simulplan

#endif  // SIMULPLAN_SEARCH_TREE_HPP_
