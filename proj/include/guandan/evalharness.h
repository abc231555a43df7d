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

// Team-vs-team matches between policies.

#ifndef GUANDAN_EVALHARNESS_H_
#define GUANDAN_EVALHARNESS_H_

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "guandan/engine.h"
#include "guandan/qnet.h"

namespace guandan {

// A decision rule. `legal` is the legal action list for `obs`; the harness
// checks the returned group against it. Implementations must be safe to call
// from several threads at once; per-game randomness comes in through `rng`.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual CardGroup act(const Observation& obs, std::span<const CardGroup> legal, std::mt19937_64& rng) const = 0;
  virtual std::string name() const = 0;
};

class RandomPolicy : public Policy {
 public:
  CardGroup act(const Observation& obs, std::span<const CardGroup> legal, std::mt19937_64& rng) const override;
  std::string name() const override { return "random"; }
};

// Small cards first, same type before bombs, bombs only against a short hand.
class HeuristicPolicy : public Policy {
 public:
  explicit HeuristicPolicy(int bomb_threshold = 6) : bomb_threshold_(bomb_threshold) {}
  CardGroup act(const Observation& obs, std::span<const CardGroup> legal, std::mt19937_64& rng) const override;
  std::string name() const override { return "heuristic"; }

 private:
  int bomb_threshold_;  // bomb when an opponent holds at most this many cards
};

// Argmax of the network over the legal actions.
class GreedyPolicy : public Policy {
 public:
  GreedyPolicy(std::shared_ptr<const QNet> net, std::string label);
  CardGroup act(const Observation& obs, std::span<const CardGroup> legal, std::mt19937_64& rng) const override;
  std::string name() const override { return label_; }

 private:
  std::shared_ptr<const QNet> net_;
  std::string label_;
};

// "random", "heuristic", or a checkpoint path (optionally "greedy:<path>").
std::shared_ptr<const Policy> make_policy(const std::string& name);

// Bombs, straight flushes (natural cards only) and the joker bomb held in `hand`.
int count_structures(const CardMultiset& hand);

struct GameResult {
  std::uint64_t seed = 0;
  bool mirrored = false;  // policy A sat at seats 1 and 3
  bool a_won = false;
  bool fault = false;     // some seat played outside its legal set; that side forfeits
  std::string fault_detail;
  int rounds = 0;
  // promotions[side][levels gained] counts rounds the side won as Banker's team.
  std::array<std::array<int, 4>, 2> promotions{};
};

struct WinStats {
  std::uint64_t games = 0;
  std::uint64_t wins_a = 0;
  std::uint64_t wins_b = 0;
  std::uint64_t faults = 0;
  std::uint64_t rounds = 0;
  std::array<std::array<std::uint64_t, 4>, 2> promotions{};
  std::vector<std::uint64_t> seeds;
  std::vector<GameResult> results;  // in (seed, mirror) order

  double winrate_a() const { return games ? static_cast<double>(wins_a) / games : 0.0; }
  void add(const GameResult& r);
};

struct MatchOptions {
  std::uint64_t base_seed = 1;
  bool mirror = true;
  int max_rounds = 500;  // an episode still running after this is a fault
};

// One full episode; A on seats 0 and 2 unless `mirrored`.
GameResult play_game(const Policy& a, const Policy& b, std::uint64_t seed, bool mirrored, int max_rounds);

// Seeds base_seed .. base_seed + n_games - 1; with mirroring each deal is
// played twice, so games = 2 * n_games. Games run on an OpenMP pool; results
// do not depend on the thread count.
WinStats run_match(const Policy& a, const Policy& b, int n_games, const MatchOptions& options);

struct CheckpointRow {
  std::string checkpoint;
  std::int64_t step = -1;
  double elapsed_s = -1;
  WinStats stats;
  bool readable = true;
  std::string warning;
};

// Evaluates every *.gdqn under `dir`, ordered by name, as policy A against
// `opponent`. Throws if the directory holds no checkpoint. Step and elapsed
// time come from checkpoints/index.csv when present.
std::vector<CheckpointRow> evaluate_checkpoints(const std::string& dir, const Policy& opponent, int n_games,
                                                const MatchOptions& options);

// checkpoint,games,wins_a,winrate_a,faults,step,elapsed_s
std::string checkpoint_csv(const std::vector<CheckpointRow>& rows);

// Spearman rank correlation with average ranks for ties. NaN if either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace guandan

#endif  // GUANDAN_EVALHARNESS_H_
