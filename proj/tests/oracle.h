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

// Brute-force reference for group classification and move generation.
// Deliberately shares no code with rules.cc beyond the card types and
// `beats`: wilds are replaced by every concrete card they could stand for
// and the resulting plain cards are matched against the textbook patterns.

#ifndef GUANDAN_TESTS_ORACLE_H_
#define GUANDAN_TESTS_ORACLE_H_

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <vector>

#include "guandan/cards.h"
#include "guandan/rules.h"

namespace guandan::oracle {

using RankKey = std::tuple<int, int, int>;  // type, key, bomb size

inline RankKey key_of(const GroupRank& g) { return {static_cast<int>(g.type), g.key, g.bomb_size}; }

// Lowest sequence position if the positions {p} (with A tried low and high)
// form `len` consecutive values; nullopt otherwise.
inline std::optional<int> run_start(const std::vector<Rank>& distinct, int len) {
  if (static_cast<int>(distinct.size()) != len) return std::nullopt;
  for (int ace_pos : {1, 14}) {
    std::vector<int> pos;
    for (Rank r : distinct) {
      if (is_joker(r)) return std::nullopt;
      pos.push_back(r == Rank::kAce ? ace_pos : ordinal(r) + 2);
    }
    std::sort(pos.begin(), pos.end());
    bool consecutive = true;
    for (int i = 1; i < len; ++i) consecutive &= pos[i] == pos[i - 1] + 1;
    if (consecutive) return pos.front();
  }
  return std::nullopt;
}

// Classification of wild-free concrete cards (wild status is not consulted).
inline std::set<RankKey> classify_plain(const std::vector<Card>& cards, Level level) {
  std::set<RankKey> out;
  const int n = static_cast<int>(cards.size());
  std::map<Rank, int> hist;
  std::set<int> suits;
  for (Card c : cards) {
    hist[c.rank()]++;
    if (c.suit()) suits.insert(ordinal(*c.suit()));
  }
  auto so = [&](Rank r) { return single_order(r, level); };
  if (n == 1) {
    out.insert({static_cast<int>(GroupType::kSingle), so(cards[0].rank()), 0});
    return out;
  }
  if (hist.size() == 1) {
    Rank r = hist.begin()->first;
    if (n == 2) out.insert({static_cast<int>(GroupType::kPair), so(r), 0});
    if (!is_joker(r) && n == 3) out.insert({static_cast<int>(GroupType::kTriple), so(r), 0});
    if (!is_joker(r) && n >= 4) out.insert({static_cast<int>(GroupType::kBomb), so(r), n});
  }
  if (n == 4 && hist[Rank::kBlackJoker] == 2 && hist[Rank::kRedJoker] == 2) {
    out.insert({static_cast<int>(GroupType::kJokerBomb), 0, 0});
  }
  std::vector<Rank> distinct;
  for (auto& [r, c] : hist) {
    if (c > 0) distinct.push_back(r);
  }
  if (n == 5 && distinct.size() == 2) {
    for (int i = 0; i < 2; ++i) {
      Rank t = distinct[i], p = distinct[1 - i];
      if (hist[t] == 3 && hist[p] == 2 && !is_joker(t)) {
        out.insert({static_cast<int>(GroupType::kFullHouse), so(t), 0});
      }
    }
  }
  bool all_single = std::all_of(distinct.begin(), distinct.end(), [&](Rank r) { return hist[r] == 1; });
  if (n == 5 && all_single) {
    if (auto s = run_start(distinct, 5)) {
      GroupType t = suits.size() == 1 ? GroupType::kStraightFlush : GroupType::kStraight;
      out.insert({static_cast<int>(t), *s, 0});
    }
  }
  if (n == 6) {
    bool pairs = std::all_of(distinct.begin(), distinct.end(), [&](Rank r) { return hist[r] == 2; });
    bool triples = std::all_of(distinct.begin(), distinct.end(), [&](Rank r) { return hist[r] == 3; });
    if (pairs) {
      if (auto s = run_start(distinct, 3)) out.insert({static_cast<int>(GroupType::kTube), *s, 0});
    }
    if (triples) {
      if (auto s = run_start(distinct, 2)) out.insert({static_cast<int>(GroupType::kPlate), *s, 0});
    }
  }
  return out;
}

// Every interpretation of the exact multiset: k of its heart level cards act
// as wilds (never all of the group), each replaced by any suited card.
inline std::set<RankKey> classify_brute(const CardMultiset& cards, Level level) {
  std::set<RankKey> out;
  const int n = cards.size();
  if (n < 1 || n > kMaxGroupSize) return out;
  const Card wild = wild_card(level);
  const int wilds = cards.count(wild);
  for (int k = 0; k <= wilds && k < n; ++k) {
    std::vector<Card> natural;
    for (Card c : cards.cards()) natural.push_back(c);
    for (int i = 0; i < k; ++i) natural.erase(std::find(natural.begin(), natural.end(), wild));
    std::vector<int> sub(k, 0);
    auto recurse = [&](auto&& self, int pos, int from) -> void {
      if (pos == k) {
        std::vector<Card> concrete = natural;
        for (int idx : sub) concrete.push_back(Card::from_index(idx));
        auto got = classify_plain(concrete, level);
        out.insert(got.begin(), got.end());
        return;
      }
      for (int idx = from; idx < 52; ++idx) {
        sub[pos] = idx;
        self(self, pos + 1, idx);
      }
    };
    recurse(recurse, 0, 0);
  }
  return out;
}

using ActionKey = std::tuple<int, int, int, std::array<std::uint8_t, kNumCards>>;

inline ActionKey action_key(const CardGroup& g) {
  return {static_cast<int>(g.type), g.key, g.bomb_size, g.cards.counts()};
}

// All subsets -> classify -> filter by beats (+ Pass when following).
inline std::set<ActionKey> legal_actions_brute(const CardMultiset& hand, const std::optional<CardGroup>& to_beat,
                                               Level level) {
  std::set<ActionKey> out;
  std::vector<int> idx;
  for (int i = 0; i < kNumCards; ++i) {
    if (hand.count(i) > 0) idx.push_back(i);
  }
  CardMultiset sub;
  auto recurse = [&](auto&& self, std::size_t pos) -> void {
    if (pos == idx.size()) {
      if (sub.size() < 1 || sub.size() > kMaxGroupSize) return;
      for (const RankKey& rk : classify_brute(sub, level)) {
        GroupRank g{static_cast<GroupType>(std::get<0>(rk)), std::get<1>(rk), std::get<2>(rk)};
        if (to_beat && !beats(g, to_beat->rank())) continue;
        out.insert({std::get<0>(rk), std::get<1>(rk), std::get<2>(rk), sub.counts()});
      }
      return;
    }
    for (int c = 0; c <= hand.count(idx[pos]); ++c) {
      sub.set_count(idx[pos], c);
      self(self, pos + 1);
    }
    sub.set_count(idx[pos], 0);
  };
  recurse(recurse, 0);
  if (to_beat) out.insert(action_key(CardGroup::pass()));
  return out;
}

}  // namespace guandan::oracle

#endif  // GUANDAN_TESTS_ORACLE_H_
