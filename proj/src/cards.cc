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

#include "guandan/cards.h"

#include <cctype>
#include <sstream>

namespace guandan {
namespace {

constexpr char kRankChars[kNumSuitedRanks + 1] = "23456789TJQKA";
constexpr char kSuitChars[kNumSuits + 1] = "HSDC";

int suit_from_char(char c) {
  switch (c) {
    case 'H': case 'h': return 0;
    case 'S': case 's': return 1;
    case 'D': case 'd': return 2;
    case 'C': case 'c': return 3;
    default: return -1;
  }
}

}  // namespace

Card Card::joker(Rank rank) {
  if (!is_joker(rank)) throw GuandanError("Card::joker: not a joker rank");
  return from_index(rank == Rank::kBlackJoker ? kBlackJokerIndex : kRedJokerIndex);
}

Card Card::from_index(int index) {
  if (index < 0 || index >= kNumCards) throw GuandanError("card index out of range: " + std::to_string(index));
  Card c;
  c.index_ = static_cast<std::uint8_t>(index);
  return c;
}

Card Card::parse(std::string_view text) {
  if (text == "BJ" || text == "bj") return from_index(kBlackJokerIndex);
  if (text == "RJ" || text == "rj") return from_index(kRedJokerIndex);
  if (text.size() < 2) throw GuandanError("bad card code: '" + std::string(text) + "'");
  int suit = suit_from_char(text[0]);
  if (suit < 0) throw GuandanError("bad card suit: '" + std::string(text) + "'");
  Rank rank = parse_rank(text.substr(1));
  if (is_joker(rank)) throw GuandanError("jokers have no suit: '" + std::string(text) + "'");
  return Card(rank, static_cast<Suit>(suit));
}

std::string Card::to_string() const {
  if (index_ == kBlackJokerIndex) return "BJ";
  if (index_ == kRedJokerIndex) return "RJ";
  return {kSuitChars[index_ % 4], kRankChars[index_ / 4]};
}

Level::Level(Rank rank) : rank_(rank) {
  if (is_joker(rank)) throw GuandanError("jokers are never levels");
}

char rank_char(Rank rank) {
  if (is_joker(rank)) return rank == Rank::kBlackJoker ? 'B' : 'R';
  return kRankChars[ordinal(rank)];
}

std::string rank_name(Rank rank) {
  if (rank == Rank::kBlackJoker) return "BJ";
  if (rank == Rank::kRedJoker) return "RJ";
  return std::string(1, kRankChars[ordinal(rank)]);
}

Rank parse_rank(std::string_view text) {
  if (text == "BJ") return Rank::kBlackJoker;
  if (text == "RJ") return Rank::kRedJoker;
  if (text == "10") return Rank::kTen;
  if (text.size() == 1) {
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    for (int i = 0; i < kNumSuitedRanks; ++i) {
      if (kRankChars[i] == c) return static_cast<Rank>(i);
    }
  }
  throw GuandanError("bad rank: '" + std::string(text) + "'");
}

CardMultiset CardMultiset::full_deck() {
  CardMultiset m;
  m.counts_.fill(kDeckCopies);
  m.size_ = kFullDeckSize;
  return m;
}

CardMultiset CardMultiset::from_cards(const std::vector<Card>& cards) {
  CardMultiset m;
  for (Card c : cards) m.add(c);
  return m;
}

CardMultiset CardMultiset::parse(std::string_view text) {
  CardMultiset m;
  std::istringstream in{std::string(text)};
  std::string token;
  while (in >> token) m.add(Card::parse(token));
  return m;
}

int CardMultiset::rank_count(Rank r) const {
  if (r == Rank::kBlackJoker) return counts_[kBlackJokerIndex];
  if (r == Rank::kRedJoker) return counts_[kRedJokerIndex];
  int base = 4 * ordinal(r);
  return counts_[base] + counts_[base + 1] + counts_[base + 2] + counts_[base + 3];
}

void CardMultiset::add(Card c, int n) {
  int next = counts_[c.index()] + n;
  if (n < 0 || next > kDeckCopies) throw GuandanError("card count out of range for " + c.to_string());
  counts_[c.index()] = static_cast<std::uint8_t>(next);
  size_ += n;
}

void CardMultiset::remove(Card c, int n) {
  int next = counts_[c.index()] - n;
  if (n < 0 || next < 0) throw GuandanError("removing card not held: " + c.to_string());
  counts_[c.index()] = static_cast<std::uint8_t>(next);
  size_ -= n;
}

void CardMultiset::set_count(int index, int n) {
  if (n < 0 || n > kDeckCopies) throw GuandanError("card count out of range");
  size_ += n - counts_[index];
  counts_[index] = static_cast<std::uint8_t>(n);
}

bool CardMultiset::contains(const CardMultiset& other) const {
  for (int i = 0; i < kNumCards; ++i) {
    if (other.counts_[i] > counts_[i]) return false;
  }
  return true;
}

CardMultiset& CardMultiset::operator+=(const CardMultiset& other) {
  for (int i = 0; i < kNumCards; ++i) {
    int next = counts_[i] + other.counts_[i];
    if (next > kDeckCopies) throw GuandanError("multiset union exceeds two copies");
    counts_[i] = static_cast<std::uint8_t>(next);
  }
  size_ += other.size_;
  return *this;
}

CardMultiset& CardMultiset::operator-=(const CardMultiset& other) {
  for (int i = 0; i < kNumCards; ++i) {
    if (other.counts_[i] > counts_[i]) throw GuandanError("multiset difference goes negative");
    counts_[i] = static_cast<std::uint8_t>(counts_[i] - other.counts_[i]);
  }
  size_ -= other.size_;
  return *this;
}

std::vector<Card> CardMultiset::cards() const {
  std::vector<Card> out;
  out.reserve(size_);
  for (int i = 0; i < kNumCards; ++i) {
    for (int k = 0; k < counts_[i]; ++k) out.push_back(Card::from_index(i));
  }
  return out;
}

std::uint64_t CardMultiset::hash() const {
  // FNV-1a over the count bytes.
  std::uint64_t h = 1469598103934665603ULL;
  for (std::uint8_t c : counts_) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string CardMultiset::to_string() const {
  std::string out;
  for (Card c : cards()) {
    if (!out.empty()) out += ' ';
    out += c.to_string();
  }
  return out;
}

std::array<std::int8_t, kNumCards> encode54(const CardMultiset& cards) {
  std::array<std::int8_t, kNumCards> v{};
  for (int i = 0; i < kNumCards; ++i) v[i] = static_cast<std::int8_t>(cards.count(i));
  return v;
}

int single_order(Rank rank, Level level) {
  switch (rank) {
    case Rank::kRedJoker: return 15;
    case Rank::kBlackJoker: return 14;
    default: return rank == level.rank() ? 13 : ordinal(rank);
  }
}

std::vector<int> sequence_ordinal(Rank rank) {
  if (is_joker(rank)) throw GuandanError("jokers never form sequences");
  if (rank == Rank::kAce) return {1, 14};
  return {ordinal(rank) + 2};
}

Rank rank_at_sequence(int position) {
  if (position == 1 || position == 14) return Rank::kAce;
  if (position < 2 || position > 13) throw GuandanError("sequence position out of range");
  return static_cast<Rank>(position - 2);
}

bool is_wild(Card card, Level level) { return card == wild_card(level); }

}  // namespace guandan
