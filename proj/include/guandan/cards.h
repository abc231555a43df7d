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

#ifndef GUANDAN_CARDS_H_
#define GUANDAN_CARDS_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace guandan {

class GuandanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed serialized input; `offset` is the byte position of the problem.
class FormatError : public GuandanError {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : GuandanError(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

enum class Rank : std::uint8_t {
  kTwo = 0,
  kThree,
  kFour,
  kFive,
  kSix,
  kSeven,
  kEight,
  kNine,
  kTen,
  kJack,
  kQueen,
  kKing,
  kAce,
  kBlackJoker,
  kRedJoker,
};

// Heart is listed first: heart level cards are the wild cards.
enum class Suit : std::uint8_t { kHeart = 0, kSpade, kDiamond, kClub };

inline constexpr int kNumRanks = 15;
inline constexpr int kNumSuitedRanks = 13;
inline constexpr int kNumSuits = 4;
inline constexpr int kNumCards = 54;
inline constexpr int kDeckCopies = 2;
inline constexpr int kFullDeckSize = kNumCards * kDeckCopies;
inline constexpr int kHandSize = 27;
inline constexpr int kBlackJokerIndex = 52;
inline constexpr int kRedJokerIndex = 53;

constexpr int ordinal(Rank r) { return static_cast<int>(r); }
constexpr int ordinal(Suit s) { return static_cast<int>(s); }
constexpr bool is_joker(Rank r) { return r == Rank::kBlackJoker || r == Rank::kRedJoker; }
inline Rank rank_from_ordinal(int i) { return static_cast<Rank>(i); }

// One of the 54 distinct cards. Jokers carry no suit.
class Card {
 public:
  constexpr Card() = default;
  constexpr Card(Rank rank, Suit suit) : index_(static_cast<std::uint8_t>(4 * ordinal(rank) + ordinal(suit))) {
    if (is_joker(rank)) index_ = rank == Rank::kBlackJoker ? kBlackJokerIndex : kRedJokerIndex;
  }
  static Card joker(Rank rank);
  static Card from_index(int index);
  // Accepts "H5", "DT", "SA", "BJ", "RJ"; also "10" for ten.
  static Card parse(std::string_view text);

  constexpr int index() const { return index_; }
  constexpr Rank rank() const {
    if (index_ >= kBlackJokerIndex) return index_ == kBlackJokerIndex ? Rank::kBlackJoker : Rank::kRedJoker;
    return static_cast<Rank>(index_ / 4);
  }
  constexpr std::optional<Suit> suit() const {
    if (index_ >= kBlackJokerIndex) return std::nullopt;
    return static_cast<Suit>(index_ % 4);
  }
  std::string to_string() const;

  friend constexpr auto operator<=>(const Card&, const Card&) = default;

 private:
  std::uint8_t index_ = 0;
};

// index = 4 * rank_ordinal + suit_ordinal for 2..A, BJ = 52, RJ = 53.
constexpr int card_index(Card card) { return card.index(); }

// The rank of the current round. Never a joker.
class Level {
 public:
  constexpr Level() = default;
  explicit Level(Rank rank);
  constexpr Rank rank() const { return rank_; }
  constexpr int ordinal() const { return static_cast<int>(rank_); }
  bool is_ace() const { return rank_ == Rank::kAce; }
  friend constexpr auto operator<=>(const Level&, const Level&) = default;

 private:
  Rank rank_ = Rank::kTwo;
};

char rank_char(Rank rank);
std::string rank_name(Rank rank);
Rank parse_rank(std::string_view text);

// Count of each distinct card, each in [0, 2].
class CardMultiset {
 public:
  CardMultiset() { counts_.fill(0); }
  static CardMultiset full_deck();
  static CardMultiset from_cards(const std::vector<Card>& cards);
  // Space separated card codes, e.g. "H5 H5 SA".
  static CardMultiset parse(std::string_view text);

  int count(Card c) const { return counts_[c.index()]; }
  int count(int index) const { return counts_[index]; }
  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  int rank_count(Rank r) const;

  void add(Card c, int n = 1);
  void remove(Card c, int n = 1);
  void set_count(int index, int n);

  bool contains(const CardMultiset& other) const;
  CardMultiset& operator+=(const CardMultiset& other);
  CardMultiset& operator-=(const CardMultiset& other);
  friend CardMultiset operator+(CardMultiset a, const CardMultiset& b) { return a += b; }
  friend CardMultiset operator-(CardMultiset a, const CardMultiset& b) { return a -= b; }
  friend bool operator==(const CardMultiset& a, const CardMultiset& b) { return a.counts_ == b.counts_; }
  friend auto operator<=>(const CardMultiset& a, const CardMultiset& b) { return a.counts_ <=> b.counts_; }

  // Cards in index order, one entry per copy.
  std::vector<Card> cards() const;
  const std::array<std::uint8_t, kNumCards>& counts() const { return counts_; }
  std::uint64_t hash() const;
  std::string to_string() const;

 private:
  std::array<std::uint8_t, kNumCards> counts_;
  int size_ = 0;
};

// Element i is the count of the card with index i.
std::array<std::int8_t, kNumCards> encode54(const CardMultiset& cards);

// Single-card strength: RJ > BJ > level rank > A > K > ... > 2.
int single_order(Rank rank, Level level);

// Sequence positions used for straights, tubes and plates: A -> {1, 14},
// 2 -> {2}, ..., K -> {13}. Throws for jokers.
std::vector<int> sequence_ordinal(Rank rank);
// Inverse of sequence_ordinal: 1 and 14 map to A.
Rank rank_at_sequence(int position);

bool is_wild(Card card, Level level);
inline Card wild_card(Level level) { return Card(level.rank(), Suit::kHeart); }

}  // namespace guandan

template <>
struct std::hash<guandan::CardMultiset> {
  std::size_t operator()(const guandan::CardMultiset& m) const noexcept { return m.hash(); }
};

#endif  // GUANDAN_CARDS_H_
