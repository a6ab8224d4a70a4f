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

#include "simulplan/planners.hpp"

#include <charconv>
#include <sstream>
#include <string_view>

namespace simulplan {
namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("invalid number for '" + key + "': '" + text + "'");
}

int parse_int(const std::string& key, const std::string& text) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("invalid integer for '" + key + "': '" + text + "'");
  }
  return v;
}

}  // namespace

ValueFunction parse_value_function(const std::string& id) {
  if (id == "reward") return ValueFunction::kReward;
  if (id == "terminal") return ValueFunction::kTerminal;
  throw ConfigError("unknown value function '" + id + "'");
}

std::string to_string(ValueFunction v) { return v == ValueFunction::kReward ? "reward" : "terminal"; }

void PlannerConfig::validate() const {
  if (iterations < 1) throw ConfigError("planner iterations must be >= 1");
  if (depth < 1) throw ConfigError("planner depth must be >= 1");
  if (bandit.kind == BanditKind::kUcb1 && !(bandit.c >= 0.0f)) throw ConfigError("UCB1 c must be >= 0");
  if (bandit.kind == BanditKind::kThompson && !(bandit.alpha > 0.0f && bandit.beta > 0.0f)) {
    throw ConfigError("Thompson prior alpha and beta must be > 0");
  }
}

std::string PlannerConfig::name() const {
  std::string out;
  switch (algorithm) {
    case Algorithm::kMcs:
      out = "mcs";
      break;
    case Algorithm::kMcts:
      out = "mcts";
      break;
    case Algorithm::kFdts:
      out = "fdts";
      break;
  }
  switch (bandit.kind) {
    case BanditKind::kUcb1:
      out += "-ucb";
      break;
    case BanditKind::kThompson:
      out += "-ts";
      break;
    case BanditKind::kRandom:
      out += "-random";
      break;
  }
  if (algorithm == Algorithm::kMcts && !rollouts) out += "-norollout";
  return out;
}

PlannerConfig parse_planner_spec(const std::string& spec, const PlannerConfig& defaults) {
  PlannerConfig cfg = defaults;
  const std::size_t colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::vector<std::string> parts = split(head, '-');
  if (parts.size() < 2 || parts.size() > 3) throw ConfigError("unknown planner spec '" + spec + "'");

  if (parts[0] == "mcs") {
    cfg.algorithm = Algorithm::kMcs;
  } else if (parts[0] == "mcts") {
    cfg.algorithm = Algorithm::kMcts;
  } else if (parts[0] == "fdts") {
    cfg.algorithm = Algorithm::kFdts;
  } else {
    throw ConfigError("unknown planner algorithm '" + parts[0] + "' in '" + spec + "'");
  }

  if (parts[1] == "ts") {
    cfg.bandit = BanditSpec::thompson(defaults.bandit.alpha, defaults.bandit.beta);
  } else if (parts[1] == "ucb") {
    cfg.bandit = BanditSpec::ucb1(defaults.bandit.c);
  } else if (parts[1] == "random") {
    cfg.bandit = BanditSpec::uniform();
  } else {
    throw ConfigError("unknown bandit '" + parts[1] + "' in '" + spec + "'");
  }

  cfg.rollouts = true;
  if (parts.size() == 3) {
    if (parts[2] != "norollout" || cfg.algorithm != Algorithm::kMcts) {
      throw ConfigError("unknown planner modifier '" + parts[2] + "' in '" + spec + "'");
    }
    cfg.rollouts = false;
  }

  if (colon != std::string::npos) {
    for (const std::string& kv : split(std::string_view(spec).substr(colon + 1), ',')) {
      const std::size_t eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("expected key=value in '" + spec + "', got '" + kv + "'");
      const std::string key = kv.substr(0, eq);
      const std::string val = kv.substr(eq + 1);
      if (key == "c") {
        cfg.bandit.c = static_cast<float>(parse_double(key, val));
      } else if (key == "alpha") {
        cfg.bandit.alpha = static_cast<float>(parse_double(key, val));
      } else if (key == "beta") {
        cfg.bandit.beta = static_cast<float>(parse_double(key, val));
      } else if (key == "iters" || key == "iterations") {
        cfg.iterations = parse_int(key, val);
      } else if (key == "depth" || key == "k") {
        cfg.depth = parse_int(key, val);
      } else if (key == "value") {
        cfg.value = parse_value_function(val);
      } else if (key == "final") {
        if (val == "best") {
          cfg.stochastic_final = false;
        } else if (val == "sample") {
          cfg.stochastic_final = true;
        } else {
          throw ConfigError("final must be 'best' or 'sample', got '" + val + "'");
        }
      } else {
        throw ConfigError("unknown planner option '" + key + "' in '" + spec + "'");
      }
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace simulplan
