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

#include "simulplan/bandits.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace simulplan {

std::string BanditSpec::name() const {
  std::ostringstream out;
  switch (kind) {
    case BanditKind::kUcb1:
      out << "ucb(c=" << c << ")";
      break;
    case BanditKind::kThompson:
      out << "ts(alpha=" << alpha << ",beta=" << beta << ")";
      break;
    case BanditKind::kRandom:
      out << "random";
      break;
  }
  return out.str();
}

double ucb_score(const ArmStats& arm, std::uint32_t total, double c) {
  if (arm.visits == 0) return std::numeric_limits<double>::infinity();
  const double exploration = std::sqrt(std::log(static_cast<double>(total)) / arm.visits);
  return static_cast<double>(arm.mean) + c * exploration;
}

double posterior_mean(const ArmStats& arm, const BanditSpec& spec) {
  const double a = static_cast<double>(arm.successes) + spec.alpha;
  const double b = static_cast<double>(arm.failures) + spec.beta;
  return a / (a + b);
}

BanditInstance::BanditInstance(const ActionList& actions, BanditSpec spec) : spec_(spec) {
  arms_.reserve(actions.size());
  for (Action a : actions) arms_.push_back(ArmStats{a});
}

int BanditInstance::index_of(Action a) const {
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    if (arms_[i].action == a) return static_cast<int>(i);
  }
  throw ContractError("bandit has no arm for action " + std::to_string(a.id));
}

namespace {

// Argmax with uniform random tie-breaking (reservoir over the maxima).
template <class ScoreFn>
Action argmax_random_ties(const BanditInstance& instance, Rng& rng, ScoreFn score) {
  const auto arms = instance.arms();
  if (arms.empty()) throw ContractError("selection on a bandit without arms");
  double best = -std::numeric_limits<double>::infinity();
  int best_index = 0;
  int ties = 0;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    const double s = score(arms[i]);
    if (s > best) {
      best = s;
      best_index = static_cast<int>(i);
      ties = 1;
    } else if (s == best) {
      ++ties;
      if (uniform_index(rng, ties) == 0) best_index = static_cast<int>(i);
    }
  }
  return arms[static_cast<std::size_t>(best_index)].action;
}

template <class KeyFn>
Action argmax_lowest_id(const BanditInstance& instance, KeyFn key) {
  const auto arms = instance.arms();
  const ArmStats* best = nullptr;
  double best_key = 0.0;
  for (const ArmStats& arm : arms) {
    const double k = key(arm);
    if (best == nullptr || k > best_key || (k == best_key && arm.action < best->action)) {
      best = &arm;
      best_key = k;
    }
  }
  return best->action;
}

}  // namespace

double sample_beta(double a, double b, Rng& rng) {
  const double x = std::gamma_distribution<double>(a, 1.0)(rng);
  const double y = std::gamma_distribution<double>(b, 1.0)(rng);
  const double sum = x + y;
  return sum > 0.0 ? x / sum : 0.5;
}

Action ucb_select(const BanditInstance& instance, Rng& rng) {
  const double c = instance.spec().c;
  const std::uint32_t total = instance.total();
  return argmax_random_ties(instance, rng,
                            [&](const ArmStats& arm) { return ucb_score(arm, total, c); });
}

Action ts_select(const BanditInstance& instance, Rng& rng) {
  if (instance.size() == 1) return instance.arms()[0].action;
  const BanditSpec& spec = instance.spec();
  return argmax_random_ties(instance, rng, [&](const ArmStats& arm) {
    return sample_beta(static_cast<double>(arm.successes) + spec.alpha,
                       static_cast<double>(arm.failures) + spec.beta, rng);
  });
}

Action random_select(const BanditInstance& instance, Rng& rng) {
  if (instance.empty()) throw ContractError("selection on a bandit without arms");
  return instance.arms()[static_cast<std::size_t>(uniform_index(rng, instance.size()))].action;
}

Action select_action(const BanditInstance& instance, Rng& rng) {
  switch (instance.spec().kind) {
    case BanditKind::kUcb1:
      return ucb_select(instance, rng);
    case BanditKind::kThompson:
      return ts_select(instance, rng);
    case BanditKind::kRandom:
      return random_select(instance, rng);
  }
  throw ContractError("unknown bandit kind");
}

void update(BanditInstance& instance, Action action, double value) {
  if (!(value >= -1.0 - 1e-9 && value <= 1.0 + 1e-9)) {
    throw ContractError("bandit update value outside [-1, 1]");
  }
  ArmStats& arm = instance.arms_[static_cast<std::size_t>(instance.index_of(action))];
  const double win = (value + 1.0) / 2.0;
  arm.visits += 1;
  arm.mean += static_cast<float>((value - arm.mean) / arm.visits);
  arm.successes += static_cast<float>(win);
  arm.failures += static_cast<float>(1.0 - win);
  instance.total_ += 1;
}

Action best_action(const BanditInstance& instance) {
  if (instance.total() == 0) throw ContractError("best_action on a bandit that was never updated");
  switch (instance.spec().kind) {
    case BanditKind::kUcb1:
      return argmax_lowest_id(instance, [](const ArmStats& a) { return double(a.visits); });
    case BanditKind::kThompson: {
      const BanditSpec& spec = instance.spec();
      return argmax_lowest_id(instance,
                              [&](const ArmStats& a) { return posterior_mean(a, spec); });
    }
    case BanditKind::kRandom:
      return argmax_lowest_id(instance, [](const ArmStats& a) {
        return a.visits == 0 ? -std::numeric_limits<double>::infinity() : double(a.mean);
      });
  }
  throw ContractError("unknown bandit kind");
}

Action sample_final_action(const BanditInstance& instance, Rng& rng) {
  if (instance.total() == 0) throw ContractError("final action on a bandit that was never updated");
  if (instance.spec().kind == BanditKind::kThompson) return ts_select(instance, rng);
  std::uint32_t pick = std::uniform_int_distribution<std::uint32_t>(0, instance.total() - 1)(rng);
  for (const ArmStats& arm : instance.arms()) {
    if (pick < arm.visits) return arm.action;
    pick -= arm.visits;
  }
  return instance.arms().back().action;
}

}  // namespace simulplan
