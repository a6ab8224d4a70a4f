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

#ifndef SIMULPLAN_TYPES_HPP_
#define SIMULPLAN_TYPES_HPP_

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/container/static_vector.hpp>

namespace simulplan {

inline constexpr int kMaxPlayers = 4;
inline constexpr int kMaxActions = 16;

/// Violated pre-condition of a game or planner operation (querying a
/// terminal state, applying an illegal action, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Bad user-supplied configuration or input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PlayerId {
  int index = 0;

  friend constexpr auto operator<=>(PlayerId, PlayerId) = default;
};

struct Action {
  std::uint8_t id = 0;

  friend constexpr auto operator<=>(Action, Action) = default;
};

using ActionList = boost::container::static_vector<Action, kMaxActions>;

/// One action slot per player, indexed by PlayerId. Slots of players that are
/// not required to act are ignored by the environment.
class JointAction {
 public:
  JointAction() = default;
  explicit JointAction(int num_players) : size_(num_players) {}

  int size() const { return size_; }
  Action& operator[](PlayerId p) { return actions_[static_cast<std::size_t>(p.index)]; }
  Action operator[](PlayerId p) const { return actions_[static_cast<std::size_t>(p.index)]; }
  Action& operator[](int p) { return actions_[static_cast<std::size_t>(p)]; }
  Action operator[](int p) const { return actions_[static_cast<std::size_t>(p)]; }

  friend bool operator==(const JointAction& a, const JointAction& b) {
    if (a.size_ != b.size_) return false;
    for (int i = 0; i < a.size_; ++i) {
      if (a.actions_[static_cast<std::size_t>(i)] != b.actions_[static_cast<std::size_t>(i)]) {
        return false;
      }
    }
    return true;
  }

 private:
  std::array<Action, kMaxPlayers> actions_{};
  int size_ = 0;
};

/// Per-player value estimate, each entry in [-1, 1].
class Value {
 public:
  Value() = default;
  explicit Value(int num_players) : size_(num_players) {}

  int size() const { return size_; }
  double& operator[](int p) { return v_[static_cast<std::size_t>(p)]; }
  double operator[](int p) const { return v_[static_cast<std::size_t>(p)]; }

 private:
  std::array<double, kMaxPlayers> v_{};
  int size_ = 0;
};

/// 64-bit hash of a state's canonical byte serialization.
struct StateKey {
  std::uint64_t hash = 0;

  friend constexpr auto operator<=>(StateKey, StateKey) = default;
};

struct StateKeyHasher {
  std::size_t operator()(StateKey k) const noexcept { return static_cast<std::size_t>(k.hash); }
};

inline std::string to_string(PlayerId p) { return "player " + std::to_string(p.index); }

}  // namespace simulplan

#endif  // SIMULPLAN_TYPES_HPP_
