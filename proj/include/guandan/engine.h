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

#ifndef GUANDAN_ENGINE_H_
#define GUANDAN_ENGINE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "guandan/cards.h"
#include "guandan/rules.h"

namespace guandan {

inline constexpr int kNumPlayers = 4;

// Seats 0..3, play passes 0 -> 1 -> 2 -> 3 -> 0. Partners sit opposite.
using PlayerId = int;
constexpr int team_of(PlayerId p) { return p % 2; }
constexpr PlayerId partner_of(PlayerId p) { return (p + 2) % kNumPlayers; }

// Players in the order they emptied their hands: Banker, Follower, Third, Dweller.
using FinishOrder = std::array<PlayerId, kNumPlayers>;
using RewardVector = std::array<double, kNumPlayers>;

class IllegalActionError : public GuandanError {
 public:
  using GuandanError::GuandanError;
};

struct RoundState {
  std::array<CardMultiset, kNumPlayers> hands;
  Level round_level;
  PlayerId trick_leader = 0;
  std::optional<CardGroup> to_beat;
  PlayerId to_beat_owner = -1;
  int consecutive_passes = 0;
  std::array<bool, kNumPlayers> passed{};  // since the last play of this trick
  PlayerId turn = 0;
  std::vector<PlayerId> finished;
  std::array<CardMultiset, kNumPlayers> played;
  std::array<std::vector<CardGroup>, kNumPlayers> history;  // each player's plays, in order
  std::array<std::optional<CardGroup>, kNumPlayers> last_move;
  bool over = false;
  FinishOrder finish_order{};  // valid once over

  bool is_finished(PlayerId p) const;
  bool leading() const { return !to_beat.has_value(); }
};

struct EpisodeState {
  std::uint64_t seed = 0;
  std::array<Level, 2> team_levels{};
  Level round_level;
  std::optional<FinishOrder> previous_finish;
  int round_index = 1;
  bool terminal = false;
  int winning_team = -1;
};

// One seat's legal view of the round: nothing about other hands beyond their sizes.
struct Observation {
  PlayerId viewer = 0;
  CardMultiset hand;
  std::array<CardMultiset, kNumPlayers> played;
  std::array<int, kNumPlayers> remaining{};
  std::optional<CardGroup> to_beat;
  PlayerId to_beat_owner = -1;
  std::optional<CardGroup> partner_last_move;  // nullopt before the partner moved
  bool partner_finished = false;
  std::array<std::optional<CardGroup>, kNumPlayers> last_moves;
  std::array<Level, 2> team_levels{};
  Level round_level;
  PlayerId trick_leader = 0;
  int round_index = 1;
};

struct StepEvents {
  bool trick_ended = false;
  std::optional<PlayerId> player_finished;
  bool round_over = false;
  PlayerId next_turn = -1;
};

struct TributeTransfer {
  PlayerId from = 0;
  PlayerId to = 0;
  Card card;
  bool is_return = false;
};

struct TributeResult {
  bool skipped = false;    // first round
  bool cancelled = false;  // anti-tribute: the payers hold both red jokers
  std::vector<TributeTransfer> transfers;
  PlayerId leader = 0;
};

struct RoundSummary {
  FinishOrder finish_order{};
  RewardVector rewards{};
  std::array<Level, 2> levels_before{};
  std::array<Level, 2> levels_after{};
  int promotion = 0;  // levels gained by the Banker's team
  bool episode_over = false;
  int winning_team = -1;
};

// +3/+2/+1 to the Banker's team by partner position, negated for the other
// team; zero when the team at A wins the A round with the partner last.
RewardVector assign_round_rewards(const FinishOrder& finished, Level round_level,
                                  const std::array<Level, 2>& team_levels);

// Applies the round result to the team levels and round level.
EpisodeState promote_levels(EpisodeState episode, const FinishOrder& finished);

// Tribute and return from the previous round's result. Mutates `hands`.
TributeResult tribute_phase(const EpisodeState& episode, std::array<CardMultiset, kNumPlayers>& hands);

// The card a payer must hand over: highest single_order, never the wild
// unless nothing else is left.
Card tribute_card(const CardMultiset& hand, Level level);
// The card the receiver hands back: point <= 10, sparing bombs and straight
// flushes when it can.
Card return_card(const CardMultiset& hand, Level level);

class Game {
 public:
  static Game new_episode(std::uint64_t seed);
  // Resumes from an explicit position (fixtures, tests). `rng_state` seeds
  // the deals of later rounds.
  static Game from_state(const EpisodeState& episode, const RoundState& round, std::uint64_t rng_state);

  const EpisodeState& episode() const { return episode_; }
  const RoundState& round() const { return round_; }
  const TributeResult& last_tribute() const { return tribute_; }
  PlayerId current_player() const { return round_.turn; }
  bool round_over() const { return round_.over; }
  bool episode_over() const { return episode_.terminal; }

  std::vector<CardGroup> legal_actions() const;
  // Throws IllegalActionError, leaving the state untouched.
  StepEvents step(const CardGroup& action);
  Observation observe(PlayerId viewer) const;

  RewardVector round_rewards() const;
  // Promotes levels for the finished round; unless the episode ended, deals
  // the next round and runs the tribute phase.
  RoundSummary finish_round();

  // Card conservation and turn-order checks; throws GuandanError on violation.
  void check_invariants() const;

 private:
  explicit Game(std::uint64_t seed);
  void deal();
  void end_round();
  PlayerId next_active(PlayerId from) const;

  EpisodeState episode_;
  RoundState round_;
  TributeResult tribute_;
  std::mt19937_64 rng_;
};

}  // namespace guandan

#endif  // GUANDAN_ENGINE_H_
