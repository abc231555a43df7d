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

// Reference state encoding, built card by card from the layout table.

#ifndef GUANDAN_TESTS_FEATURES_ORACLE_H_
#define GUANDAN_TESTS_FEATURES_ORACLE_H_

#include <map>
#include <vector>

#include "guandan/engine.h"
#include "guandan/rules.h"

namespace guandan::oracle {

// Shares nothing with the encoder except the card types.
inline std::vector<float> oracle_state(const Observation& o) {
  std::vector<float> v;
  auto block = [&](const std::vector<Card>& cards) {
    std::vector<float> b(54, 0.0f);
    for (Card c : cards) {
      if (c.suit()) {
        b[4 * static_cast<int>(c.rank()) + static_cast<int>(*c.suit())] += 1;
      } else {
        b[c.rank() == Rank::kBlackJoker ? 52 : 53] += 1;
      }
    }
    v.insert(v.end(), b.begin(), b.end());
  };
  block(o.hand.cards());
  std::map<int, int> seen;
  for (Card c : o.hand.cards()) seen[card_index(c)]++;
  for (int p = 0; p < 4; ++p)
    for (Card c : o.played[p].cards()) seen[card_index(c)]++;
  std::vector<Card> unseen;
  for (int i = 0; i < 54; ++i)
    for (int k = seen[i]; k < 2; ++k) unseen.push_back(Card::from_index(i));
  block(unseen);
  block(o.to_beat ? o.to_beat->cards.cards() : std::vector<Card>{});
  if (o.partner_finished) {
    v.insert(v.end(), 54, -1.0f);
  } else {
    block(o.partner_last_move ? o.partner_last_move->cards.cards() : std::vector<Card>{});
  }
  for (int k = 1; k <= 3; ++k) {
    std::vector<float> onehot(28, 0.0f);
    onehot.at(o.remaining[(o.viewer + k) % 4]) = 1;
    v.insert(v.end(), onehot.begin(), onehot.end());
  }
  for (int k = 1; k <= 3; ++k) block(o.played[(o.viewer + k) % 4].cards());
  std::vector<float> lv(40, 0.0f);
  lv[o.team_levels[o.viewer % 2].ordinal()] = 1;
  lv[13 + o.team_levels[(o.viewer + 1) % 2].ordinal()] = 1;
  lv[26 + o.round_level.ordinal()] = 1;
  v.insert(v.end(), lv.begin(), lv.end());
  int wilds = 0;
  for (Card c : o.hand.cards()) wilds += (c.rank() == o.round_level.rank() && c.suit() == Suit::kHeart);
  v.push_back(wilds >= 1);
  v.push_back(wilds == 2);
  auto caps = wild_capabilities(o.hand, o.round_level);
  for (bool b : caps) v.push_back(wilds > 0 && b);
  return v;
}

}  // namespace guandan::oracle

#endif  // GUANDAN_TESTS_FEATURES_ORACLE_H_
