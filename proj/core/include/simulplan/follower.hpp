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

#ifndef SIMULPLAN_FOLLOWER_HPP_
#define SIMULPLAN_FOLLOWER_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "simulplan/grid_arena.hpp"
#include "simulplan/grid_features.hpp"
#include "simulplan/planners.hpp"
#include "simulplan/rng.hpp"
#include "simulplan/types.hpp"

namespace simulplan::follower {

inline constexpr int kNumOutputs = grid::kNumMoves;

struct PolicyDims {
  int input = 0;
  /// Width of the tanh hidden layer; 0 for a plain affine scorer.
  int hidden = 0;

  std::size_t num_params() const;
  friend bool operator==(const PolicyDims&, const PolicyDims&) = default;
};

using Scores = std::array<double, kNumOutputs>;

/// Differentiable scorer features -> one score per move, softmax-normalized.
///
/// Parameter layout (row-major): without a hidden layer W[6][in], b[6];
/// with one, W1[h][in], b1[h], W2[6][h], b2[6].
class FollowerPolicy {
 public:
  FollowerPolicy() = default;
  /// All-zero parameters.
  explicit FollowerPolicy(PolicyDims dims);
  /// Glorot-uniform weights, zero biases.
  static FollowerPolicy initialize(PolicyDims dims, std::uint64_t seed);

  const PolicyDims& dims() const { return dims_; }
  std::span<const double> params() const { return params_; }
  std::vector<double>& mutable_params() { return params_; }

  Scores scores(std::span<const float> features) const;
  Scores probabilities(std::span<const float> features) const;

  /// Mean cross-entropy over the batch; `grad` (resized to num_params) gets
  /// its gradient.
  double loss_and_gradient(std::span<const std::vector<float>> features, std::span<const int> labels,
                           std::vector<double>& grad) const;
  double loss(std::span<const std::vector<float>> features, std::span<const int> labels) const;

  std::uint64_t hash() const;

 private:
  PolicyDims dims_;
  std::vector<double> params_;
};

Scores softmax(const Scores& scores);

/// Highest-scoring action among `mask`, lowest id on ties. Throws
/// ContractError for an empty mask.
Action follower_act(const FollowerPolicy& policy, std::span<const float> features, const ActionList& mask);
Action follower_act(const FollowerPolicy& policy, const grid::GridState& state, PlayerId player);

struct Adam {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<double> m;
  std::vector<double> v;
  std::int64_t t = 0;

  void step(std::vector<double>& params, const std::vector<double>& grad);
};

struct DaggerSample {
  grid::ObservationCodes observation;
  std::uint8_t label = 0;
  std::uint8_t player = 0;
  std::uint32_t episode = 0;
  std::uint32_t step = 0;
};

/// Fixed-capacity FIFO buffer; once full the oldest sample is overwritten.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 200000) : capacity_(capacity) {}

  void add(DaggerSample sample);
  std::size_t size() const { return samples_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_added() const { return total_added_; }
  const DaggerSample& operator[](std::size_t i) const { return samples_[i]; }
  bool empty() const { return samples_.empty(); }

 private:
  std::size_t capacity_;
  std::vector<DaggerSample> samples_;
  std::size_t next_ = 0;
  std::uint64_t total_added_ = 0;
};

/// `steps` Adam updates on minibatches drawn uniformly (with replacement)
/// from the buffer. Returns the mean minibatch loss (0 when steps == 0).
double train_steps(FollowerPolicy& policy, Adam& adam, const ReplayBuffer& buffer, int steps, int batch_size,
                   Rng& rng);

/// Mean cross-entropy of the policy on the given samples.
double dataset_loss(const FollowerPolicy& policy, std::span<const DaggerSample> samples);
/// Fraction of samples whose argmax (over all six moves) matches the label.
double dataset_accuracy(const FollowerPolicy& policy, std::span<const DaggerSample> samples);

enum class ImitationMode : std::uint8_t { kDagger, kBehavioralCloning };

ImitationMode parse_imitation_mode(const std::string& id);
std::string to_string(ImitationMode mode);

struct FollowerConfig {
  ImitationMode mode = ImitationMode::kDagger;
  int episodes = 500;
  int grad_steps = 200;
  int batch_size = 32;
  double learning_rate = 1e-3;
  int hidden = 64;
  std::size_t buffer_capacity = 200000;
  std::uint64_t seed = 0;
  grid::GridConfig env = grid::GridConfig::ffa();
  PlannerConfig oracle;
  /// Keep the canonical key of every state visited during collection.
  bool record_states = false;

  void validate() const;
};

struct TrainingReport {
  FollowerPolicy policy;
  ReplayBuffer buffer;
  /// Mean minibatch loss per episode.
  std::vector<double> episode_loss;
  std::vector<int> episode_length;
  std::vector<StateKey> visited;
  std::uint64_t skipped_steps = 0;
};

/// Initial follower for the config: Glorot init seeded from config.seed.
FollowerPolicy initial_policy(const FollowerConfig& config);

/// Self-play data collection (follower acts in DAgger mode, oracle acts in
/// behavioral-cloning mode) with oracle labels for every alive seat,
/// followed by `grad_steps` updates after each episode.
TrainingReport train_follower(const FollowerConfig& config, FollowerPolicy policy);
TrainingReport dagger_train(FollowerConfig config, FollowerPolicy policy);
TrainingReport behavioral_clone(FollowerConfig config, FollowerPolicy policy);

struct Checkpoint {
  FollowerPolicy policy;
  std::uint64_t seed = 0;
  int episodes = 0;
  std::string mode;
  int height = 0;
  int width = 0;
};

/// Versioned checkpoint: plain-text header lines terminated by "end\n",
/// followed by the parameters as little-endian IEEE-754 doubles.
std::string write_checkpoint(const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::string& bytes);
void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

/// One line per sample: metadata, the decoded features as fixed-width
/// decimals and the label.
std::string export_buffer(const ReplayBuffer& buffer);
/// Accepts what export_buffer writes. Features are re-encoded, so values
/// must be multiples of a per-plane scale (as exported ones are).
ReplayBuffer import_buffer(const std::string& text, std::size_t capacity = 200000);

}  // namespace simulplan::follower

#endif  // SIMULPLAN_FOLLOWER_HPP_
