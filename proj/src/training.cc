// Copyright 2026 The guandan-dmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "guandan/training.h"

#include <algorithm>
#include <cmath>

namespace guandan {

Transition Transition::make(const StateVector& s, const CardGroup& a, float q_actor, std::uint64_t version,
                            PlayerId player, int round) {
  Transition t;
  for (int i = 0; i < kStateDim; ++i) {
    const float v = s[i];
    if (v != std::round(v) || v < -128 || v > 127) throw GuandanError("state feature is not a small integer");
    t.state[i] = static_cast<std::int8_t>(v);
  }
  auto av = encode_action(a);
  for (int i = 0; i < kActionDim; ++i) t.action[i] = static_cast<std::int8_t>(av[i]);
  t.q_actor = q_actor;
  t.param_version = version;
  t.player = static_cast<std::uint8_t>(player);
  t.round = static_cast<std::uint16_t>(round);
  return t;
}

void Transition::input(float* out) const {
  for (int i = 0; i < kStateDim; ++i) out[i] = state[i];
  for (int i = 0; i < kActionDim; ++i) out[kStateDim + i] = action[i];
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw GuandanError("replay buffer capacity must be positive");
}

void ReplayBuffer::push(const Transition& t) { push(std::span<const Transition>(&t, 1)); }

void ReplayBuffer::push(std::span<const Transition> ts) {
  std::lock_guard lock(mu_);
  for (const auto& t : ts) {
    if (items_.size() == capacity_) items_.pop_front();
    items_.emplace_back(next_seq_++, t);
  }
}

std::vector<Transition> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  std::lock_guard lock(mu_);
  if (items_.empty()) throw GuandanError("sampling from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<Transition> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(items_[pick(rng)].second);
  return out;
}

std::size_t ReplayBuffer::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

std::uint64_t ReplayBuffer::total_pushed() const {
  std::lock_guard lock(mu_);
  return next_seq_;
}

std::vector<std::uint64_t> ReplayBuffer::sequence_numbers() const {
  std::lock_guard lock(mu_);
  std::vector<std::uint64_t> out;
  out.reserve(items_.size());
  for (const auto& [seq, t] : items_) out.push_back(seq);
  return out;
}

int epsilon_greedy_select(std::span<const float> q_values, double epsilon, std::mt19937_64& rng) {
  if (q_values.empty()) throw GuandanError("no legal actions to choose from");
  if (epsilon > 0 && std::uniform_real_distribution<double>(0, 1)(rng) < epsilon) {
    return static_cast<int>(std::uniform_int_distribution<std::size_t>(0, q_values.size() - 1)(rng));
  }
  return static_cast<int>(std::max_element(q_values.begin(), q_values.end()) - q_values.begin());
}

ClippedTarget preprocess_target(double q_actor, double q_learner, double lambda) {
  if (!(lambda > 0)) throw GuandanError("lambda must be positive");
  if (std::isinf(lambda)) return {q_learner, true};
  if (std::abs(q_actor) < kNearZeroActorQ) {
    const double band = lambda * std::max(1.0, std::abs(q_learner));
    const double lo = q_actor - band, hi = q_actor + band;
    if (q_learner > hi) return {hi, false};
    if (q_learner < lo) return {lo, false};
    return {q_learner, true};
  }
  const double ratio = q_learner / q_actor;
  if (ratio > 1 + lambda) return {(1 + lambda) * q_actor, false};
  if (ratio < 1 - lambda) return {(1 - lambda) * q_actor, false};
  return {q_learner, true};
}

LearnerStats learner_update(std::span<const Transition> batch, QNet& net, Optimizer& opt, double lambda) {
  const int n = static_cast<int>(batch.size());
  if (n == 0) throw GuandanError("empty batch");
  std::vector<float> x(static_cast<std::size_t>(n) * kInputDim);
  for (int i = 0; i < n; ++i) batch[i].input(x.data() + static_cast<std::size_t>(i) * kInputDim);

  QNet::Tape tape;
  std::vector<float> q(n), dq(n);
  net.forward_train(x.data(), n, tape, q.data());
  double loss = 0;
  int clipped = 0;
  for (int i = 0; i < n; ++i) {
    const auto target = preprocess_target(batch[i].q_actor, q[i], lambda);
    const double err = target.value - batch[i].reward;
    loss += err * err;
    // dQ_p/dq_learner is 1 inside the band and 0 where the clip holds.
    dq[i] = target.in_band ? static_cast<float>(2 * err / n) : 0.0f;
    clipped += !target.in_band;
  }
  std::vector<float> grad(net.num_params());
  net.backward(tape, dq.data(), grad.data());
  opt.step(net.params(), grad);
  net.set_version(net.version() + 1);
  return {loss / n, static_cast<double>(clipped) / n};
}

LearnerStats learner_step(const ReplayBuffer& buffer, QNet& net, Optimizer& opt, int batch, double lambda,
                          std::mt19937_64& rng) {
  if (batch < 1) throw GuandanError("batch size must be at least 1");
  if (buffer.size() < static_cast<std::size_t>(batch)) throw GuandanError("replay buffer holds fewer than one batch");
  auto sample = buffer.sample(static_cast<std::size_t>(batch), rng);
  return learner_update(sample, net, opt, lambda);
}

std::size_t EpisodeRecord::num_transitions() const {
  std::size_t n = 0;
  for (const auto& t : trajectories) n += t.size();
  return n;
}

std::vector<float> evaluate_actions(const QNet& net, const StateVector& state, std::span<const CardGroup> actions) {
  const int n = static_cast<int>(actions.size());
  std::vector<float> a(static_cast<std::size_t>(n) * kActionDim);
  for (int i = 0; i < n; ++i) {
    auto v = encode_action(actions[i]);
    std::copy(v.begin(), v.end(), a.begin() + static_cast<std::size_t>(i) * kActionDim);
  }
  std::vector<float> q(n);
  net.q_values(state.data(), a.data(), n, q.data());
  return q;
}

EpisodeRecord run_actor_episode(std::uint64_t seed, const QNet& net, const ActorOptions& options,
                                std::mt19937_64& rng) {
  EpisodeRecord rec;
  rec.seed = seed;
  try {
    Game g = Game::new_episode(seed);
    while (!g.episode_over()) {
      if (static_cast<int>(rec.rounds.size()) >= options.max_rounds) throw GuandanError("episode exceeded round cap");
      RoundRecord round;
      round.round_level = g.round().round_level;
      round.team_levels = g.episode().team_levels;
      std::array<std::size_t, kNumPlayers> first{};
      for (PlayerId p = 0; p < kNumPlayers; ++p) first[p] = rec.trajectories[p].size();
      const int round_index = g.episode().round_index;
      while (!g.round_over()) {
        const PlayerId p = g.current_player();
        auto legal = g.legal_actions();
        auto state = encode_state(g.observe(p));
        auto q = evaluate_actions(net, state, legal);
        const int pick = epsilon_greedy_select(q, options.epsilon, rng);
        rec.trajectories[p].push_back(Transition::make(state, legal[pick], q[pick], net.version(), p, round_index));
        round.moves.push_back({p, legal[pick]});
        g.step(legal[pick]);
        g.check_invariants();
      }
      round.rewards = g.round_rewards();
      round.finish_order = g.round().finish_order;
      for (PlayerId p = 0; p < kNumPlayers; ++p) {
        for (std::size_t i = first[p]; i < rec.trajectories[p].size(); ++i) {
          rec.trajectories[p][i].reward = static_cast<float>(round.rewards[p]);
        }
      }
      rec.rounds.push_back(std::move(round));
      g.finish_round();
    }
    rec.completed = true;
  } catch (const GuandanError& e) {
    rec.error = e.what();
    // Keep only rounds that finished and were stamped.
    const auto done = static_cast<std::uint16_t>(rec.rounds.size());
    for (auto& traj : rec.trajectories) {
      std::erase_if(traj, [&](const Transition& t) { return t.round > done; });
    }
  }
  return rec;
}

}  // namespace guandan
