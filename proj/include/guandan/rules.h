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

#ifndef GUANDAN_RULES_H_
#define GUANDAN_RULES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guandan/cards.h"

namespace guandan {

enum class GroupType : std::uint8_t {
  kPass = 0,
  kSingle,
  kPair,
  kTriple,
  kTube,           // three consecutive pairs
  kPlate,          // two consecutive triples
  kFullHouse,      // triple + pair, keyed by the triple
  kStraight,       // five consecutive ranks, not all one suit
  kBomb,           // 4..10 cards of one rank
  kStraightFlush,  // five consecutive ranks of one suit
  kJokerBomb,      // BJ BJ RJ RJ
};
inline constexpr int kNumGroupTypes = 11;
inline constexpr int kMinBombSize = 4;
inline constexpr int kMaxBombSize = 10;
inline constexpr int kMaxGroupSize = 10;

std::string_view group_type_name(GroupType type);

// Comparison identity of a group without its cards.
//
// key is the group's strength within its type: single_order of the rank for
// Single/Pair/Triple/FullHouse/Bomb, and the lowest sequence position (A-low
// is 1) for Straight/StraightFlush/Tube/Plate.
struct GroupRank {
  GroupType type = GroupType::kPass;
  int key = 0;
  int bomb_size = 0;

  bool is_bomb_like() const {
    return type == GroupType::kBomb || type == GroupType::kStraightFlush || type == GroupType::kJokerBomb;
  }
  friend bool operator==(const GroupRank&, const GroupRank&) = default;
};

struct CardGroup {
  GroupType type = GroupType::kPass;
  int key = 0;
  int bomb_size = 0;
  // Rank named in the text form: the group's rank, or the lowest rank of a
  // sequence. Derived from key and level; not part of the identity.
  Rank key_rank = Rank::kTwo;
  CardMultiset cards;
  int wilds_used = 0;
  // The concrete cards the wilds stand for; the first wilds_used entries are set.
  std::array<Card, 2> wild_as{};

  static CardGroup pass() { return CardGroup{}; }
  bool is_pass() const { return type == GroupType::kPass; }
  GroupRank rank() const { return {type, key, bomb_size}; }
  bool is_bomb_like() const { return rank().is_bomb_like(); }
  int size() const { return cards.size(); }

  // "BOMB4[7]: H7 S7 D7 C7", "PAIR[Q]: SQ DQ", "PASS".
  std::string to_string() const;
  // Inverse of to_string: classifies the listed cards and selects the
  // interpretation named by the prefix.
  static CardGroup parse(std::string_view text, Level level);
};

// Two groups are the same action iff type, key and exact cards agree.
bool same_action(const CardGroup& a, const CardGroup& b);

struct CardGroupHash {
  std::size_t operator()(const CardGroup& g) const noexcept;
};
struct SameAction {
  bool operator()(const CardGroup& a, const CardGroup& b) const { return same_action(a, b); }
};

// Every legal interpretation of exactly these cards, one per distinct
// (type, key). Empty when the cards form no group.
std::vector<CardGroup> classify(const CardMultiset& cards, Level level);

// True iff `a` may be played over `b`. Keys are already level-resolved.
bool beats(const GroupRank& a, const GroupRank& b);
inline bool beats(const CardGroup& a, const CardGroup& b) { return beats(a.rank(), b.rank()); }

// Every distinct group playable from a subset of `hand`.
std::vector<CardGroup> enumerate_groups(const CardMultiset& hand, Level level);

// Leading (no to_beat): every group, Pass excluded. Following: every group
// that beats `to_beat`, plus Pass.
std::vector<CardGroup> legal_actions(const CardMultiset& hand, const std::optional<CardGroup>& to_beat,
                                     Level level);

// Checks that `action` is a legal move for the given hand and trick. Returns
// an empty string when legal, otherwise a description of the violation.
std::string check_action(const CardMultiset& hand, const std::optional<CardGroup>& to_beat, Level level,
                         const CardGroup& action);

// What the wild cards in a hand make possible. Indexed Pair, Triple, Tube,
// Plate, FullHouse, Straight, Bomb, StraightFlush, then "upgrade": some group
// using a wild outranks the best natural group of its type.
inline constexpr int kNumWildFlags = 9;
std::array<bool, kNumWildFlags> wild_capabilities(const CardMultiset& hand, Level level);

}  // namespace guandan

#endif  // GUANDAN_RULES_H_
