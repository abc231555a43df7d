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

#ifndef GUANDAN_TRAINING_H_
#define GUANDAN_TRAINING_H_

#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "guandan/engine.h"
#include "guandan/features.h"
#include "guandan/qnet.h"

namespace guandan {

// One decision as the learner sees it. Feature values are small integers
// (-1..27 counts and flags), so they are stored as int8.
struct Transition {
  std::array<std::int8_t, kStateDim> state{};
  std::array<std::int8_t, kActionDim> action{};
  float q_actor = 0;
  float reward = 0;
  std::uint64_t param_version = 0;
  std::uint8_t player = 0;
  std::uint16_t round = 0;

  static Transition make(const StateVector& s, const CardGroup& a, float q_actor, std::uint64_t version,
                         PlayerId player, int round);
  // Fills the 567 network inputs.
  void input(float* out) const;
};

// Bounded FIFO; the oldest transitions are evicted first. Every transition
// gets a sequence number on insertion. Thread-safe.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(const Transition& t);
  void push(std::span<const Transition> ts);
  // Uniform with replacement. Throws if fewer than one transition is held.
  std::vector<Transition> sample(std::size_t n, std::mt19937_64& rng) const;

  std::size_t size() const;
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_pushed() const;
  // Sequence numbers currently held, oldest first.
  std::vector<std::uint64_t> sequence_numbers() const;

 private:
  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::deque<std::pair<std::uint64_t, Transition>> items_;
  std::uint64_t next_seq_ = 0;
};

// With probability epsilon a uniform index, otherwise the argmax (lowest index
// on ties). Throws on an empty list.
int epsilon_greedy_select(std::span<const float> q_values, double epsilon, std::mt19937_64& rng);

inline constexpr double kNearZeroActorQ = 1e-6;
inline constexpr double kNoClip = std::numeric_limits<double>::infinity();

struct ClippedTarget {
  double value = 0;
  bool in_band = true;  // false where the clip is active (no gradient)
};

// clip(q_learner / q_actor, 1 - lambda, 1 + lambda) * q_actor. With
// |q_actor| < 1e-6 the learner value is clamped to q_actor +- lambda * max(1, |q_learner|).
// lambda = kNoClip returns q_learner unchanged.
ClippedTarget preprocess_target(double q_actor, double q_learner, double lambda);

struct LearnerStats {
  double loss = 0;
  double clipped_fraction = 0;
};

// Samples `batch` transitions, applies the clipped target, takes one optimizer
// step on (1/N) sum (Q_p - r)^2 and bumps the version.
LearnerStats learner_step(const ReplayBuffer& buffer, QNet& net, Optimizer& opt, int batch, double lambda,
                          std::mt19937_64& rng);
// The same update on an explicit batch.
LearnerStats learner_update(std::span<const Transition> batch, QNet& net, Optimizer& opt, double lambda);

struct MoveRecord {
  PlayerId player = 0;
  CardGroup action;
};

struct RoundRecord {
  FinishOrder finish_order{};
  RewardVector rewards{};
  Level round_level;
  std::array<Level, 2> team_levels{};  // before promotion
  std::vector<MoveRecord> moves;
};

struct EpisodeRecord {
  std::uint64_t seed = 0;
  std::array<std::vector<Transition>, kNumPlayers> trajectories;
  std::vector<RoundRecord> rounds;
  bool completed = false;
  std::string error;
  std::size_t num_transitions() const;
};

struct ActorOptions {
  double epsilon = 0.05;
  int max_rounds = 200;  // cap on pathological episodes
};

// Self-play of one episode with all four seats on `net`. Every transition of a
// round is stamped with that round's reward once the round ends.
EpisodeRecord run_actor_episode(std::uint64_t seed, const QNet& net, const ActorOptions& options,
                                std::mt19937_64& rng);

// Q for every legal action at the current decision.
std::vector<float> evaluate_actions(const QNet& net, const StateVector& state, std::span<const CardGroup> actions);

}  // namespace guandan

#endif  // GUANDAN_TRAINING_H_
