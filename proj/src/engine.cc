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

#include "guandan/engine.h"

#include <algorithm>

namespace guandan {
namespace {

int partner_position(const FinishOrder& finished) {
  PlayerId partner = partner_of(finished[0]);
  for (int i = 1; i < kNumPlayers; ++i) {
    if (finished[i] == partner) return i;
  }
  throw GuandanError("finish order does not contain the Banker's partner");
}

void validate_order(const FinishOrder& finished) {
  std::array<bool, kNumPlayers> seen{};
  for (PlayerId p : finished) {
    if (p < 0 || p >= kNumPlayers || seen[p]) throw GuandanError("finish order is not a permutation of seats");
    seen[p] = true;
  }
}

}  // namespace

bool RoundState::is_finished(PlayerId p) const {
  return std::find(finished.begin(), finished.end(), p) != finished.end();
}

RewardVector assign_round_rewards(const FinishOrder& finished, Level round_level,
                                  const std::array<Level, 2>& team_levels) {
  validate_order(finished);
  const int team = team_of(finished[0]);
  const int pos = partner_position(finished);
  double magnitude = 4 - pos;  // Follower 3, Third 2, Dweller 1
  if (round_level.is_ace() && team_levels[team].is_ace() && pos == 3) magnitude = 0;
  RewardVector r{};
  for (PlayerId p = 0; p < kNumPlayers; ++p) r[p] = team_of(p) == team ? magnitude : -magnitude;
  return r;
}

EpisodeState promote_levels(EpisodeState episode, const FinishOrder& finished) {
  validate_order(finished);
  const int team = team_of(finished[0]);
  const int pos = partner_position(finished);
  Level& level = episode.team_levels[team];
  if (level.is_ace()) {
    // A cannot be passed by promotion; the team must win a round played at A
    // with the partner not last.
    if (episode.round_level.is_ace() && pos < 3) {
      episode.terminal = true;
      episode.winning_team = team;
    }
  } else {
    int next = std::min(level.ordinal() + (4 - pos), ordinal(Rank::kAce));
    level = Level(rank_from_ordinal(next));
  }
  episode.round_level = episode.team_levels[team];
  episode.previous_finish = finished;
  episode.round_index += 1;
  return episode;
}

Card tribute_card(const CardMultiset& hand, Level level) {
  std::optional<Card> best;
  for (Card c : hand.cards()) {
    if (is_wild(c, level)) continue;
    if (!best || single_order(c.rank(), level) >= single_order(best->rank(), level)) best = c;
  }
  if (best) return *best;
  if (hand.count(wild_card(level)) > 0) return wild_card(level);
  throw GuandanError("tribute from an empty hand");
}

Card return_card(const CardMultiset& hand, Level level) {
  std::array<bool, kNumCards> in_flush{};
  for (int s = 0; s < kNumSuits; ++s) {
    for (int start = 1; start <= 10; ++start) {
      bool all = true;
      for (int i = 0; i < 5 && all; ++i) {
        Card c(rank_at_sequence(start + i), static_cast<Suit>(s));
        all = hand.count(c) > 0 && !is_wild(c, level);
      }
      if (!all) continue;
      for (int i = 0; i < 5; ++i) in_flush[card_index(Card(rank_at_sequence(start + i), static_cast<Suit>(s)))] = true;
    }
  }
  auto pick = [&](bool spare_combos, bool cap_ten) -> std::optional<Card> {
    std::optional<Card> best;
    for (Card c : hand.cards()) {
      if (is_wild(c, level) || is_joker(c.rank())) continue;
      if (cap_ten && ordinal(c.rank()) > ordinal(Rank::kTen)) continue;
      if (spare_combos && (hand.rank_count(c.rank()) >= kMinBombSize || in_flush[c.index()])) continue;
      if (!best || single_order(c.rank(), level) < single_order(best->rank(), level)) best = c;
    }
    return best;
  };
  if (auto c = pick(true, true)) return *c;
  if (auto c = pick(false, true)) return *c;
  // No card at 10 or below: hand back the weakest card at all.
  if (auto c = pick(false, false)) return *c;
  return hand.cards().front();
}

TributeResult tribute_phase(const EpisodeState& episode, std::array<CardMultiset, kNumPlayers>& hands) {
  TributeResult result;
  if (!episode.previous_finish) {
    result.skipped = true;
    return result;
  }
  const FinishOrder& prev = *episode.previous_finish;
  const Level level = episode.round_level;
  const PlayerId banker = prev[0];
  const bool double_dweller = team_of(prev[1]) == team_of(banker);
  std::vector<PlayerId> payers = double_dweller ? std::vector<PlayerId>{prev[2], prev[3]}
                                                : std::vector<PlayerId>{prev[3]};
  int red_jokers = 0;
  for (PlayerId p : payers) red_jokers += hands[p].count(kRedJokerIndex);
  if (red_jokers >= 2) {
    result.cancelled = true;
    result.leader = banker;
    return result;
  }
  auto transfer = [&](PlayerId from, PlayerId to, Card card, bool is_return) {
    hands[from].remove(card);
    hands[to].add(card);
    result.transfers.push_back({from, to, card, is_return});
  };
  if (!double_dweller) {
    const PlayerId payer = payers[0];
    transfer(payer, banker, tribute_card(hands[payer], level), false);
    transfer(banker, payer, return_card(hands[banker], level), true);
    result.leader = payer;
    return result;
  }
  // Both losers pay; the Banker takes the higher card (the Dweller's on a
  // tie), the Banker's partner the other. Each receiver returns to his payer.
  const PlayerId follower = prev[1];
  Card from_third = tribute_card(hands[prev[2]], level);
  Card from_dweller = tribute_card(hands[prev[3]], level);
  PlayerId to_banker = prev[3], to_follower = prev[2];
  if (single_order(from_third.rank(), level) > single_order(from_dweller.rank(), level)) {
    std::swap(to_banker, to_follower);
  }
  transfer(to_banker, banker, to_banker == prev[3] ? from_dweller : from_third, false);
  transfer(to_follower, follower, to_follower == prev[3] ? from_dweller : from_third, false);
  transfer(banker, to_banker, return_card(hands[banker], level), true);
  transfer(follower, to_follower, return_card(hands[follower], level), true);
  result.leader = to_banker;
  return result;
}

Game::Game(std::uint64_t seed) : rng_(seed) {
  episode_.seed = seed;
  episode_.team_levels = {Level(Rank::kTwo), Level(Rank::kTwo)};
  episode_.round_level = Level(Rank::kTwo);
}

Game Game::new_episode(std::uint64_t seed) {
  Game g(seed);
  g.deal();
  g.tribute_.skipped = true;
  PlayerId first = static_cast<PlayerId>(g.rng_() % kNumPlayers);
  g.round_.trick_leader = first;
  g.round_.turn = first;
  return g;
}

Game Game::from_state(const EpisodeState& episode, const RoundState& round, std::uint64_t rng_state) {
  Game g(rng_state);
  g.episode_ = episode;
  g.round_ = round;
  g.tribute_.skipped = true;
  return g;
}

void Game::deal() {
  // Fisher-Yates on the raw engine output so deals do not depend on the
  // standard library's distribution implementations.
  std::vector<Card> deck = CardMultiset::full_deck().cards();
  for (std::size_t i = deck.size() - 1; i > 0; --i) {
    std::size_t j = static_cast<std::size_t>(rng_() % (i + 1));
    std::swap(deck[i], deck[j]);
  }
  round_ = RoundState{};
  round_.round_level = episode_.round_level;
  for (int i = 0; i < kFullDeckSize; ++i) round_.hands[i % kNumPlayers].add(deck[i]);
}

PlayerId Game::next_active(PlayerId from) const {
  for (int step = 1; step <= kNumPlayers; ++step) {
    PlayerId p = (from + step) % kNumPlayers;
    if (!round_.is_finished(p)) return p;
  }
  throw GuandanError("no active player");
}

std::vector<CardGroup> Game::legal_actions() const {
  if (round_.over) return {};
  return guandan::legal_actions(round_.hands[round_.turn], round_.to_beat, round_.round_level);
}

StepEvents Game::step(const CardGroup& action) {
  if (round_.over) throw IllegalActionError("round is over");
  const PlayerId p = round_.turn;
  std::string violation = check_action(round_.hands[p], round_.to_beat, round_.round_level, action);
  if (!violation.empty()) throw IllegalActionError("player " + std::to_string(p) + ": " + violation);

  StepEvents ev;
  round_.last_move[p] = action;
  if (action.is_pass()) {
    round_.passed[p] = true;
    round_.consecutive_passes += 1;
  } else {
    round_.hands[p] -= action.cards;
    round_.played[p] += action.cards;
    round_.history[p].push_back(action);
    round_.to_beat = action;
    round_.to_beat_owner = p;
    round_.passed = {};
    round_.consecutive_passes = 0;
    if (round_.hands[p].empty()) {
      round_.finished.push_back(p);
      ev.player_finished = p;
      const bool team_done = round_.is_finished(partner_of(p));
      if (round_.finished.size() >= 3 || team_done) {
        end_round();
        ev.round_over = true;
        return ev;
      }
    }
  }
  // The trick ends once every other active player has passed since the last play.
  const PlayerId owner = round_.to_beat_owner;
  bool all_passed = true;
  for (PlayerId q = 0; q < kNumPlayers; ++q) {
    if (q == owner || round_.is_finished(q)) continue;
    all_passed &= round_.passed[q];
  }
  if (all_passed) {
    PlayerId leader = round_.is_finished(owner) ? partner_of(owner) : owner;
    round_.to_beat.reset();
    round_.to_beat_owner = -1;
    round_.passed = {};
    round_.consecutive_passes = 0;
    round_.trick_leader = leader;
    round_.turn = leader;
    ev.trick_ended = true;
  } else {
    round_.turn = next_active(p);
  }
  ev.next_turn = round_.turn;
  return ev;
}

void Game::end_round() {
  std::vector<PlayerId> rest;
  for (PlayerId q = 0; q < kNumPlayers; ++q) {
    if (!round_.is_finished(q)) rest.push_back(q);
  }
  // Players still holding cards rank by hand size, then seat.
  std::stable_sort(rest.begin(), rest.end(),
                   [&](PlayerId a, PlayerId b) { return round_.hands[a].size() < round_.hands[b].size(); });
  int i = 0;
  for (PlayerId q : round_.finished) round_.finish_order[i++] = q;
  for (PlayerId q : rest) round_.finish_order[i++] = q;
  round_.over = true;
  round_.to_beat.reset();
  round_.to_beat_owner = -1;
}

RewardVector Game::round_rewards() const {
  if (!round_.over) throw GuandanError("round is not over");
  return assign_round_rewards(round_.finish_order, round_.round_level, episode_.team_levels);
}

RoundSummary Game::finish_round() {
  if (!round_.over) throw GuandanError("round is not over");
  if (episode_.terminal) throw GuandanError("episode is over");
  RoundSummary s;
  s.finish_order = round_.finish_order;
  s.rewards = round_rewards();
  s.levels_before = episode_.team_levels;
  const int team = team_of(s.finish_order[0]);
  episode_ = promote_levels(episode_, s.finish_order);
  s.levels_after = episode_.team_levels;
  s.promotion = s.levels_after[team].ordinal() - s.levels_before[team].ordinal();
  s.episode_over = episode_.terminal;
  s.winning_team = episode_.winning_team;
  if (!episode_.terminal) {
    deal();
    tribute_ = tribute_phase(episode_, round_.hands);
    round_.trick_leader = tribute_.leader;
    round_.turn = tribute_.leader;
  }
  return s;
}

Observation Game::observe(PlayerId viewer) const {
  Observation o;
  o.viewer = viewer;
  o.hand = round_.hands[viewer];
  o.played = round_.played;
  for (PlayerId p = 0; p < kNumPlayers; ++p) o.remaining[p] = round_.hands[p].size();
  o.to_beat = round_.to_beat;
  o.to_beat_owner = round_.to_beat_owner;
  o.partner_last_move = round_.last_move[partner_of(viewer)];
  o.partner_finished = round_.is_finished(partner_of(viewer));
  o.last_moves = round_.last_move;
  o.team_levels = episode_.team_levels;
  o.round_level = round_.round_level;
  o.trick_leader = round_.trick_leader;
  o.round_index = episode_.round_index;
  return o;
}

void Game::check_invariants() const {
  CardMultiset total;
  for (PlayerId p = 0; p < kNumPlayers; ++p) {
    total += round_.hands[p];
    total += round_.played[p];
  }
  if (!(total == CardMultiset::full_deck())) throw GuandanError("card conservation violated");
  for (PlayerId p : round_.finished) {
    if (!round_.hands[p].empty()) throw GuandanError("finished player holds cards");
  }
  if (!round_.over) {
    if (round_.finished.size() > 2) throw GuandanError("round should have ended");
    if (round_.is_finished(round_.turn)) throw GuandanError("finished player has the turn");
    if (round_.to_beat && round_.to_beat_owner < 0) throw GuandanError("trick has no owner");
  }
}

}  // namespace guandan
