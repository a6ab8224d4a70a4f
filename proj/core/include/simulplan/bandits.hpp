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

#ifndef SIMULPLAN_BANDITS_HPP_
#define SIMULPLAN_BANDITS_HPP_

#include <cstdint>
#include <span>
#include <string>

#include <boost/container/small_vector.hpp>

#include "simulplan/rng.hpp"
#include "simulplan/types.hpp"

namespace simulplan {

enum class BanditKind : std::uint8_t { kUcb1, kThompson, kRandom };

struct BanditSpec {
  BanditKind kind = BanditKind::kThompson;
  float c = 2.0f;      // UCB1 exploration constant
  float alpha = 1.0f;  // Beta prior
  float beta = 1.0f;

  static BanditSpec ucb1(float c) { return {BanditKind::kUcb1, c, 1.0f, 1.0f}; }
  static BanditSpec thompson(float alpha = 1.0f, float beta = 1.0f) {
    return {BanditKind::kThompson, 2.0f, alpha, beta};
  }
  static BanditSpec uniform() { return {BanditKind::kRandom, 0.0f, 1.0f, 1.0f}; }

  std::string name() const;
};

/// Statistics of one arm. `successes`/`failures` are the fractional Beta
/// pseudo-counts; a value v in [-1, 1] contributes (v+1)/2 to successes and
/// the remainder to failures, so successes + failures == visits.
struct ArmStats {
  Action action;
  std::uint32_t visits = 0;
  float mean = 0.0f;
  float successes = 0.0f;
  float failures = 0.0f;
};

/// UCB1 score: Q + c * sqrt(ln N / n). Unvisited arms score +infinity.
double ucb_score(const ArmStats& arm, std::uint32_t total, double c);

/// Posterior mean (S + alpha) / (S + F + alpha + beta).
double posterior_mean(const ArmStats& arm, const BanditSpec& spec);

/// One multi-armed bandit over a fixed action set.
class BanditInstance {
 public:
  BanditInstance() = default;
  BanditInstance(const ActionList& actions, BanditSpec spec);

  std::span<const ArmStats> arms() const { return {arms_.data(), arms_.size()}; }
  int size() const { return static_cast<int>(arms_.size()); }
  bool empty() const { return arms_.empty(); }
  std::uint32_t total() const { return total_; }
  const BanditSpec& spec() const { return spec_; }

  /// Throws ContractError for an action that is not an arm.
  const ArmStats& arm(Action a) const { return arms_[static_cast<std::size_t>(index_of(a))]; }

  friend void update(BanditInstance& instance, Action action, double value);

 private:
  int index_of(Action a) const;

  boost::container::small_vector<ArmStats, 6> arms_;
  std::uint32_t total_ = 0;
  BanditSpec spec_;
};

/// Selection according to the instance's own algorithm.
Action select_action(const BanditInstance& instance, Rng& rng);

Action ucb_select(const BanditInstance& instance, Rng& rng);
/// Draws theta ~ Beta(S + alpha, F + beta) per arm and returns the argmax;
/// ties are broken uniformly at random.
Action ts_select(const BanditInstance& instance, Rng& rng);
Action random_select(const BanditInstance& instance, Rng& rng);

/// Records one observed value for `action`. Throws for unknown actions and
/// values outside [-1, 1].
void update(BanditInstance& instance, Action action, double value);

/// Deterministic final choice after planning: highest visit count for UCB1,
/// highest posterior mean for Thompson sampling, highest empirical mean for
/// uniform selection. Ties go to the lowest action id. Throws if the instance
/// has never been updated.
Action best_action(const BanditInstance& instance);

/// Stochastic final choice: visit-count proportional for UCB1 and uniform,
/// a posterior draw for Thompson sampling.
Action sample_final_action(const BanditInstance& instance, Rng& rng);

double sample_beta(double a, double b, Rng& rng);

}  // namespace simulplan

#endif  // SIMULPLAN_BANDITS_HPP_
