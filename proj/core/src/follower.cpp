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

#include "simulplan/follower.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "simulplan/hash.hpp"

namespace simulplan::follower {
namespace {

constexpr const char* kCheckpointMagic = "SIMULPLAN-FOLLOWER v1";
constexpr const char* kBufferMagic = "simulplan-buffer 1";

// Forward pass storage for one sample.
struct Activations {
  std::vector<double> hidden;
  Scores scores{};
};

Activations forward(const PolicyDims& d, const std::vector<double>& w, std::span<const float> x) {
  if (static_cast<int>(x.size()) != d.input) {
    throw ContractError("feature vector has " + std::to_string(x.size()) + " entries, policy expects " +
                        std::to_string(d.input));
  }
  Activations act;
  const auto in = static_cast<std::size_t>(d.input);
  if (d.hidden == 0) {
    const double* bias = w.data() + kNumOutputs * in;
    for (std::size_t o = 0; o < kNumOutputs; ++o) {
      const double* row = w.data() + o * in;
      double s = bias[o];
      for (std::size_t i = 0; i < in; ++i) s += row[i] * x[i];
      act.scores[o] = s;
    }
    return act;
  }
  const auto h = static_cast<std::size_t>(d.hidden);
  const double* b1 = w.data() + h * in;
  const double* w2 = b1 + h;
  const double* b2 = w2 + kNumOutputs * h;
  act.hidden.resize(h);
  for (std::size_t j = 0; j < h; ++j) {
    const double* row = w.data() + j * in;
    double z = b1[j];
    for (std::size_t i = 0; i < in; ++i) z += row[i] * x[i];
    act.hidden[j] = std::tanh(z);
  }
  for (std::size_t o = 0; o < kNumOutputs; ++o) {
    double s = b2[o];
    for (std::size_t j = 0; j < h; ++j) s += w2[o * h + j] * act.hidden[j];
    act.scores[o] = s;
  }
  return act;
}

double cross_entropy(const Scores& scores, int label) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - top);
  return std::log(sum) + top - scores[static_cast<std::size_t>(label)];
}

void check_label(int label) {
  if (label < 0 || label >= kNumOutputs) throw ContractError("label out of range: " + std::to_string(label));
}

}  // namespace

std::size_t PolicyDims::num_params() const {
  const auto in = static_cast<std::size_t>(input);
  if (hidden == 0) return kNumOutputs * in + kNumOutputs;
  const auto h = static_cast<std::size_t>(hidden);
  return h * in + h + kNumOutputs * h + kNumOutputs;
}

FollowerPolicy::FollowerPolicy(PolicyDims dims) : dims_(dims) {
  if (dims.input < 1 || dims.hidden < 0) throw ConfigError("invalid follower dimensions");
  params_.assign(dims.num_params(), 0.0);
}

FollowerPolicy FollowerPolicy::initialize(PolicyDims dims, std::uint64_t seed) {
  FollowerPolicy policy(dims);
  Rng rng = make_rng(seed, {0x464F4C4CULL});
  auto fill = [&](std::size_t offset, int fan_in, int fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const auto count = static_cast<std::size_t>(fan_in) * static_cast<std::size_t>(fan_out);
    for (std::size_t i = 0; i < count; ++i) policy.params_[offset + i] = dist(rng);
  };
  const auto in = static_cast<std::size_t>(dims.input);
  if (dims.hidden == 0) {
    fill(0, dims.input, kNumOutputs);
  } else {
    const auto h = static_cast<std::size_t>(dims.hidden);
    fill(0, dims.input, dims.hidden);
    fill(h * in + h, dims.hidden, kNumOutputs);
  }
  return policy;
}

Scores softmax(const Scores& scores) {
  const double top = *std::max_element(scores.begin(), scores.end());
  Scores p{};
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = std::exp(scores[i] - top);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

Scores FollowerPolicy::scores(std::span<const float> features) const {
  return forward(dims_, params_, features).scores;
}

Scores FollowerPolicy::probabilities(std::span<const float> features) const { return softmax(scores(features)); }

double FollowerPolicy::loss(std::span<const std::vector<float>> features, std::span<const int> labels) const {
  if (features.size() != labels.size() || features.empty()) throw ContractError("empty or mismatched batch");
  double total = 0.0;
  for (std::size_t n = 0; n < features.size(); ++n) {
    check_label(labels[n]);
    total += cross_entropy(scores(features[n]), labels[n]);
  }
  return total / static_cast<double>(features.size());
}

double FollowerPolicy::loss_and_gradient(std::span<const std::vector<float>> features, std::span<const int> labels,
                                         std::vector<double>& grad) const {
  if (features.size() != labels.size() || features.empty()) throw ContractError("empty or mismatched batch");
  grad.assign(params_.size(), 0.0);
  const auto in = static_cast<std::size_t>(dims_.input);
  const auto h = static_cast<std::size_t>(dims_.hidden);
  const double inv_n = 1.0 / static_cast<double>(features.size());
  double total = 0.0;
  std::vector<double> dhidden(h);

  for (std::size_t n = 0; n < features.size(); ++n) {
    check_label(labels[n]);
    const std::span<const float> x = features[n];
    const Activations act = forward(dims_, params_, x);
    total += cross_entropy(act.scores, labels[n]);
    Scores ds = softmax(act.scores);
    ds[static_cast<std::size_t>(labels[n])] -= 1.0;
    for (double& v : ds) v *= inv_n;

    if (h == 0) {
      double* gb = grad.data() + kNumOutputs * in;
      for (std::size_t o = 0; o < kNumOutputs; ++o) {
        double* row = grad.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) row[i] += ds[o] * x[i];
        gb[o] += ds[o];
      }
      continue;
    }
    const double* w2 = params_.data() + h * in + h;
    double* gb1 = grad.data() + h * in;
    double* gw2 = gb1 + h;
    double* gb2 = gw2 + kNumOutputs * h;
    std::fill(dhidden.begin(), dhidden.end(), 0.0);
    for (std::size_t o = 0; o < kNumOutputs; ++o) {
      for (std::size_t j = 0; j < h; ++j) {
        gw2[o * h + j] += ds[o] * act.hidden[j];
        dhidden[j] += w2[o * h + j] * ds[o];
      }
      gb2[o] += ds[o];
    }
    for (std::size_t j = 0; j < h; ++j) {
      const double dz = dhidden[j] * (1.0 - act.hidden[j] * act.hidden[j]);
      if (dz == 0.0) continue;
      double* row = grad.data() + j * in;
      for (std::size_t i = 0; i < in; ++i) row[i] += dz * x[i];
      gb1[j] += dz;
    }
  }
  return total * inv_n;
}

std::uint64_t FollowerPolicy::hash() const {
  const std::string_view bytes(reinterpret_cast<const char*>(params_.data()), params_.size() * sizeof(double));
  return hash_combine(hash_bytes(bytes, 0x504F4C4943ULL),
                      hash_combine(static_cast<std::uint64_t>(dims_.input), static_cast<std::uint64_t>(dims_.hidden)));
}

Action follower_act(const FollowerPolicy& policy, std::span<const float> features, const ActionList& mask) {
  if (mask.empty()) throw ContractError("follower_act with an empty action mask");
  const Scores s = policy.scores(features);
  Action best = mask.front();
  for (Action a : mask) {
    const double sa = s[a.id];
    const double sb = s[best.id];
    if (sa > sb || (sa == sb && a.id < best.id)) best = a;
  }
  return best;
}

Action follower_act(const FollowerPolicy& policy, const grid::GridState& state, PlayerId player) {
  const grid::GridObservation obs = grid::featurize(state, player);
  return follower_act(policy, obs.values, state.masked_actions(player));
}

void Adam::step(std::vector<double>& params, const std::vector<double>& grad) {
  if (grad.size() != params.size()) throw ContractError("gradient size mismatch");
  if (m.size() != params.size()) {
    m.assign(params.size(), 0.0);
    v.assign(params.size(), 0.0);
    t = 0;
  }
  ++t;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
    params[i] -= learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + epsilon);
  }
}

void ReplayBuffer::add(DaggerSample sample) {
  if (capacity_ == 0) throw ContractError("replay buffer with zero capacity");
  ++total_added_;
  if (samples_.size() < capacity_) {
    samples_.push_back(std::move(sample));
    return;
  }
  samples_[next_] = std::move(sample);
  next_ = (next_ + 1) % capacity_;
}

double train_steps(FollowerPolicy& policy, Adam& adam, const ReplayBuffer& buffer, int steps, int batch_size,
                   Rng& rng) {
  if (steps <= 0) return 0.0;
  if (buffer.empty()) throw ContractError("training on an empty replay buffer");
  if (batch_size < 1) throw ContractError("batch size must be >= 1");
  std::vector<std::vector<float>> features(static_cast<std::size_t>(batch_size));
  std::vector<int> labels(static_cast<std::size_t>(batch_size));
  std::vector<double> grad;
  std::uniform_int_distribution<std::size_t> pick(0, buffer.size() - 1);
  double total = 0.0;
  for (int s = 0; s < steps; ++s) {
    for (std::size_t b = 0; b < features.size(); ++b) {
      const DaggerSample& sample = buffer[pick(rng)];
      features[b] = grid::decode_observation(sample.observation).values;
      labels[b] = sample.label;
    }
    total += policy.loss_and_gradient(features, labels, grad);
    adam.step(policy.mutable_params(), grad);
  }
  return total / steps;
}

double dataset_loss(const FollowerPolicy& policy, std::span<const DaggerSample> samples) {
  if (samples.empty()) throw ContractError("loss over an empty dataset");
  double total = 0.0;
  for (const DaggerSample& s : samples) {
    total += cross_entropy(policy.scores(grid::decode_observation(s.observation).values), s.label);
  }
  return total / static_cast<double>(samples.size());
}

double dataset_accuracy(const FollowerPolicy& policy, std::span<const DaggerSample> samples) {
  if (samples.empty()) throw ContractError("accuracy over an empty dataset");
  std::size_t hits = 0;
  for (const DaggerSample& s : samples) {
    const Scores sc = policy.scores(grid::decode_observation(s.observation).values);
    const auto best = static_cast<int>(std::max_element(sc.begin(), sc.end()) - sc.begin());
    if (best == s.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

ImitationMode parse_imitation_mode(const std::string& id) {
  if (id == "dagger") return ImitationMode::kDagger;
  if (id == "bc") return ImitationMode::kBehavioralCloning;
  throw ConfigError("unknown imitation mode '" + id + "' (expected dagger or bc)");
}

std::string to_string(ImitationMode mode) { return mode == ImitationMode::kDagger ? "dagger" : "bc"; }

void FollowerConfig::validate() const {
  if (episodes < 1) throw ConfigError("follower episodes must be >= 1");
  if (grad_steps < 0) throw ConfigError("follower gradient steps must be >= 0");
  if (batch_size < 1) throw ConfigError("follower batch size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("follower learning rate must be > 0");
  if (hidden < 0) throw ConfigError("follower hidden width must be >= 0");
  if (buffer_capacity < 1) throw ConfigError("follower buffer capacity must be >= 1");
  env.validate();
  oracle.validate();
}

FollowerPolicy initial_policy(const FollowerConfig& config) {
  return FollowerPolicy::initialize({grid::feature_size(config.env.height, config.env.width), config.hidden},
                                    config.seed);
}

TrainingReport train_follower(const FollowerConfig& config, FollowerPolicy policy) {
  config.validate();
  const PolicyDims expected{grid::feature_size(config.env.height, config.env.width), config.hidden};
  if (!(policy.dims() == expected)) throw ConfigError("follower dimensions do not match the environment");

  TrainingReport report{std::move(policy), ReplayBuffer(config.buffer_capacity), {}, {}, {}, 0};
  Adam adam;
  adam.learning_rate = config.learning_rate;
  Rng train_rng = make_rng(config.seed, {0x545241494EULL});

  for (int e = 0; e < config.episodes; ++e) {
    const auto episode = static_cast<std::uint64_t>(e);
    grid::GridState state = grid::GridState::generate(config.env, derive_seed(config.seed, {episode, 1}));
    PlannerConfig oracle_cfg = config.oracle;
    oracle_cfg.seed = derive_seed(config.seed, {episode, 2});
    Planner<grid::GridState> oracle(oracle_cfg);
    const int n = state.num_players();

    while (!state.is_terminal()) {
      if (config.record_states) report.visited.push_back(state.canonical_key());
      JointAction labels;
      try {
        labels = oracle.plan(state);
      } catch (const ContractError& err) {
        std::cerr << "warning: oracle failed at episode " << e << " step " << state.step_count() << ": "
                  << err.what() << "\n";
        ++report.skipped_steps;
        break;
      }
      JointAction joint(n);
      for (int p = 0; p < n; ++p) {
        const PlayerId pid{p};
        if (!state.agent(pid).alive) continue;
        DaggerSample sample{grid::encode_observation(state, pid), labels[p].id, static_cast<std::uint8_t>(p),
                            static_cast<std::uint32_t>(e), static_cast<std::uint32_t>(state.step_count())};
        if (config.mode == ImitationMode::kDagger) {
          joint[p] = follower_act(report.policy, grid::decode_observation(sample.observation).values,
                                  state.masked_actions(pid));
        } else {
          joint[p] = labels[p];
        }
        report.buffer.add(std::move(sample));
      }
      state = state.step(joint);
      oracle.advance(state);
    }
    report.episode_length.push_back(state.step_count());
    report.episode_loss.push_back(
        report.buffer.empty()
            ? 0.0
            : train_steps(report.policy, adam, report.buffer, config.grad_steps, config.batch_size, train_rng));
  }
  return report;
}

TrainingReport dagger_train(FollowerConfig config, FollowerPolicy policy) {
  config.mode = ImitationMode::kDagger;
  return train_follower(config, std::move(policy));
}

TrainingReport behavioral_clone(FollowerConfig config, FollowerPolicy policy) {
  config.mode = ImitationMode::kBehavioralCloning;
  return train_follower(config, std::move(policy));
}

std::string write_checkpoint(const Checkpoint& checkpoint) {
  static_assert(std::endian::native == std::endian::little, "checkpoint format assumes little-endian hosts");
  const FollowerPolicy& p = checkpoint.policy;
  std::ostringstream out;
  out << kCheckpointMagic << "\n"
      << "input " << p.dims().input << "\n"
      << "hidden " << p.dims().hidden << "\n"
      << "outputs " << kNumOutputs << "\n"
      << "board " << checkpoint.height << " " << checkpoint.width << "\n"
      << "seed " << checkpoint.seed << "\n"
      << "episodes " << checkpoint.episodes << "\n"
      << "mode " << (checkpoint.mode.empty() ? "none" : checkpoint.mode) << "\n"
      << "params " << p.params().size() << "\n"
      << "end\n";
  std::string bytes = out.str();
  const std::size_t header = bytes.size();
  bytes.resize(header + p.params().size() * sizeof(double));
  std::memcpy(bytes.data() + header, p.params().data(), p.params().size() * sizeof(double));
  return bytes;
}

Checkpoint read_checkpoint(const std::string& bytes) {
  std::size_t pos = 0;
  auto next_line = [&]() {
    const std::size_t end = bytes.find('\n', pos);
    if (end == std::string::npos) throw ConfigError("truncated follower checkpoint header");
    std::string line = bytes.substr(pos, end - pos);
    pos = end + 1;
    return line;
  };
  if (next_line() != kCheckpointMagic) throw ConfigError("not a follower checkpoint (bad magic line)");
  Checkpoint ck;
  PolicyDims dims;
  std::size_t count = 0;
  int outputs = -1;
  while (true) {
    const std::string line = next_line();
    if (line == "end") break;
    std::istringstream in(line);
    std::string key;
    in >> key;
    if (key == "input") {
      in >> dims.input;
    } else if (key == "hidden") {
      in >> dims.hidden;
    } else if (key == "outputs") {
      in >> outputs;
    } else if (key == "board") {
      in >> ck.height >> ck.width;
    } else if (key == "seed") {
      in >> ck.seed;
    } else if (key == "episodes") {
      in >> ck.episodes;
    } else if (key == "mode") {
      in >> ck.mode;
    } else if (key == "params") {
      in >> count;
    } else {
      throw ConfigError("unknown checkpoint header field '" + key + "'");
    }
    if (in.fail()) throw ConfigError("malformed checkpoint header line '" + line + "'");
  }
  if (outputs != kNumOutputs) throw ConfigError("checkpoint has an unsupported output count");
  ck.policy = FollowerPolicy(dims);
  if (count != dims.num_params()) throw ConfigError("checkpoint parameter count does not match its dimensions");
  if (bytes.size() - pos != count * sizeof(double)) throw ConfigError("checkpoint payload has the wrong size");
  std::memcpy(ck.policy.mutable_params().data(), bytes.data() + pos, count * sizeof(double));
  return ck;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
  const std::string bytes = write_checkpoint(checkpoint);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing checkpoint '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return read_checkpoint(buf.str());
}

std::string export_buffer(const ReplayBuffer& buffer) {
  std::ostringstream out;
  out << kBufferMagic;
  if (!buffer.empty()) {
    const grid::ObservationCodes& first = buffer[0].observation;
    out << " height " << first.height << " width " << first.width << " scales";
    out << std::setprecision(9);
    for (float s : first.scale) out << " " << s;
  }
  out << "\n";
  out << std::fixed << std::setprecision(6);
  for (std::size_t i = 0; i < buffer.size(); ++i) {
    const DaggerSample& s = buffer[i];
    out << static_cast<int>(s.label) << " " << static_cast<int>(s.player) << " " << s.episode << " " << s.step;
    const grid::GridObservation obs = grid::decode_observation(s.observation);
    for (float v : obs.values) out << " " << static_cast<double>(v);
    out << "\n";
  }
  return out.str();
}

ReplayBuffer import_buffer(const std::string& text, std::size_t capacity) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind(kBufferMagic, 0) != 0) {
    throw ConfigError("not a simulplan buffer export (bad header)");
  }
  ReplayBuffer buffer(capacity);
  std::istringstream header(line.substr(std::string(kBufferMagic).size()));
  std::string word;
  grid::ObservationCodes shape;
  bool have_shape = false;
  if (header >> word) {
    if (word != "height" || !(header >> shape.height >> word) || word != "width" || !(header >> shape.width >> word) ||
        word != "scales") {
      throw ConfigError("malformed buffer header");
    }
    for (float& s : shape.scale) {
      if (!(header >> s) || !(s > 0.0f)) throw ConfigError("malformed buffer header scales");
    }
    have_shape = true;
  }
  const std::size_t plane = static_cast<std::size_t>(shape.height * shape.width);
  const std::size_t size = plane * grid::kNumPlanes;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (!have_shape) throw ConfigError("buffer records without a shape header");
    std::istringstream row(line);
    int label = 0;
    int player = 0;
    DaggerSample s;
    if (!(row >> label >> player >> s.episode >> s.step) || label < 0 || label >= kNumOutputs || player < 0 ||
        player >= kMaxPlayers) {
      throw ConfigError("malformed buffer record at line " + std::to_string(line_no));
    }
    s.label = static_cast<std::uint8_t>(label);
    s.player = static_cast<std::uint8_t>(player);
    s.observation = shape;
    s.observation.codes.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      double v = 0.0;
      if (!(row >> v)) throw ConfigError("short feature row at line " + std::to_string(line_no));
      const double code = std::round(v / shape.scale[i / plane]);
      if (code < 0.0 || code > 255.0) throw ConfigError("feature out of range at line " + std::to_string(line_no));
      s.observation.codes[i] = static_cast<std::uint8_t>(code);
    }
    buffer.add(std::move(s));
  }
  return buffer;
}

}  // namespace simulplan::follower
