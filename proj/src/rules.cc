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

#include "guandan/rules.h"

#include <algorithm>
#include <bit>
#include <unordered_set>

namespace guandan {
namespace {

constexpr int kBlackJokerRank = 13;
constexpr int kRedJokerRank = 14;

using SuitPick = std::array<std::uint8_t, kNumSuits>;

// A rank position in a shape: `natural` real cards of `rank` plus `wilds`
// wild cards standing in for it. suit >= 0 pins the natural cards to one suit.
struct Slot {
  int rank = 0;
  int natural = 0;
  int wilds = 0;
  int suit = -1;
};

struct Shape {
  GroupRank rank;
  Rank key_rank = Rank::kTwo;
  int wilds = 0;
  std::array<Slot, 5> slots{};
  int num_slots = 0;

  void add(int r, int natural, int w, int suit = -1) { slots[num_slots++] = Slot{r, natural, w, suit}; }
};

int bomb_tier(const GroupRank& g) {
  switch (g.type) {
    case GroupType::kBomb: return 2 * g.bomb_size;
    case GroupType::kStraightFlush: return 11;  // between Bomb(5) and Bomb(6)
    case GroupType::kJokerBomb: return 100;
    default: return 0;
  }
}

// All distinct ways of taking n cards from per-suit availability.
void suit_choices(const std::array<int, kNumSuits>& avail, int n, std::vector<SuitPick>& out) {
  out.clear();
  SuitPick pick{};
  for (int a = std::min(avail[0], n); a >= 0; --a) {
    pick[0] = static_cast<std::uint8_t>(a);
    int r1 = n - a;
    for (int b = std::min(avail[1], r1); b >= 0; --b) {
      pick[1] = static_cast<std::uint8_t>(b);
      int r2 = r1 - b;
      for (int c = std::min(avail[2], r2); c >= 0; --c) {
        pick[2] = static_cast<std::uint8_t>(c);
        int d = r2 - c;
        if (d <= avail[3]) {
          pick[3] = static_cast<std::uint8_t>(d);
          out.push_back(pick);
        }
      }
    }
  }
}

// Walks every group shape a hand supports, for a given number of acting
// wilds, and hands each one to a sink.
class ShapeWalker {
 public:
  ShapeWalker(const CardMultiset& hand, Level level) : hand_(hand), level_(level) {
    wild_index_ = card_index(wild_card(level));
    wilds_in_hand_ = hand.count(wild_index_);
  }

  int wilds_in_hand() const { return wilds_in_hand_; }
  int wild_index() const { return wild_index_; }
  Level level() const { return level_; }

  // Availability of natural cards when k wilds are acting as wilds.
  void set_acting_wilds(int k) {
    k_ = k;
    for (int r = 0; r < kNumSuitedRanks; ++r) {
      int total = 0;
      for (int s = 0; s < kNumSuits; ++s) {
        int n = hand_.count(4 * r + s);
        if (4 * r + s == wild_index_) n -= k;
        avail_[r][s] = n;
        total += n;
      }
      total_[r] = total;
    }
    avail_[kBlackJokerRank] = {hand_.count(kBlackJokerIndex), 0, 0, 0};
    avail_[kRedJokerRank] = {hand_.count(kRedJokerIndex), 0, 0, 0};
    total_[kBlackJokerRank] = hand_.count(kBlackJokerIndex);
    total_[kRedJokerRank] = hand_.count(kRedJokerIndex);
  }

  const std::array<int, kNumSuits>& avail(int r) const { return avail_[r]; }
  int total(int r) const { return total_[r]; }

  // `allow(type)` prunes whole families before any shape is built.
  template <typename Allow, typename Sink>
  void walk(Allow&& allow, Sink&& sink) {
    const int k = k_;
    Shape shape;
    if (k == 0 && allow(GroupType::kSingle)) {
      for (int i = 0; i < kNumCards; ++i) {
        if (hand_.count(i) == 0) continue;
        Card c = Card::from_index(i);
        shape = Shape{};
        shape.rank = {GroupType::kSingle, single_order(c.rank(), level_), 0};
        shape.key_rank = c.rank();
        int r = ordinal(c.rank());
        shape.add(r, 1, 0, c.suit() ? ordinal(*c.suit()) : 0);
        sink(shape);
      }
    }
    // Same-rank groups. At least one natural card: an all-wild group is only
    // ever read as level cards, which the k == 0 pass covers.
    const bool want_pair = allow(GroupType::kPair), want_triple = allow(GroupType::kTriple),
               want_bomb = allow(GroupType::kBomb);
    for (int r = 0; r < kNumSuitedRanks; ++r) {
      for (int n = 2; n <= kMaxBombSize; ++n) {
        int natural = n - k;
        if (natural < 1) continue;
        if (natural > total_[r]) break;
        GroupType type = n == 2 ? GroupType::kPair : n == 3 ? GroupType::kTriple : GroupType::kBomb;
        if ((type == GroupType::kPair && !want_pair) || (type == GroupType::kTriple && !want_triple) ||
            (type == GroupType::kBomb && !want_bomb))
          continue;
        shape = Shape{};
        shape.rank = {type, single_order(rank_from_ordinal(r), level_), type == GroupType::kBomb ? n : 0};
        shape.key_rank = rank_from_ordinal(r);
        shape.wilds = k;
        shape.add(r, natural, k);
        sink(shape);
      }
    }
    if (k == 0) {
      for (int jr : {kBlackJokerRank, kRedJokerRank}) {
        if (want_pair && total_[jr] == 2) {
          shape = Shape{};
          shape.rank = {GroupType::kPair, single_order(rank_from_ordinal(jr), level_), 0};
          shape.key_rank = rank_from_ordinal(jr);
          shape.add(jr, 2, 0);
          sink(shape);
        }
      }
      if (allow(GroupType::kJokerBomb) && total_[kBlackJokerRank] == 2 && total_[kRedJokerRank] == 2) {
        shape = Shape{};
        shape.rank = {GroupType::kJokerBomb, 0, 0};
        shape.key_rank = Rank::kRedJoker;
        shape.add(kBlackJokerRank, 2, 0);
        shape.add(kRedJokerRank, 2, 0);
        sink(shape);
      }
    }
    if (allow(GroupType::kFullHouse)) walk_full_houses(sink);
    if (allow(GroupType::kStraight)) walk_straights(sink, /*flush=*/false);
    if (allow(GroupType::kStraightFlush)) walk_straights(sink, /*flush=*/true);
    if (allow(GroupType::kTube)) walk_runs(sink, GroupType::kTube, 3, 2);
    if (allow(GroupType::kPlate)) walk_runs(sink, GroupType::kPlate, 2, 3);
  }

 private:
  template <typename Sink>
  void walk_full_houses(Sink& sink) {
    const int k = k_;
    Shape shape;
    for (int t = 0; t < kNumSuitedRanks; ++t) {
      for (int kt = 0; kt <= std::min(k, 2); ++kt) {
        int kp = k - kt;
        if (kp > 2 || 3 - kt > total_[t]) continue;
        bool all_wild_pair_done = false;
        for (int p = 0; p < kNumRanks; ++p) {
          if (p == t) continue;
          bool joker = p >= kBlackJokerRank;
          if (joker) {
            if (kp != 0 || total_[p] != 2) continue;
          } else {
            if (2 - kp > total_[p]) continue;
            if (kp == 2) {
              // Every choice of p yields the same cards and key.
              if (all_wild_pair_done) continue;
              all_wild_pair_done = true;
            }
          }
          shape = Shape{};
          shape.rank = {GroupType::kFullHouse, single_order(rank_from_ordinal(t), level_), 0};
          shape.key_rank = rank_from_ordinal(t);
          shape.wilds = k;
          shape.add(t, 3 - kt, kt);
          shape.add(p, 2 - kp, kp);
          sink(shape);
        }
      }
    }
  }

  template <typename Sink>
  void walk_straights(Sink& sink, bool flush) {
    const int k = k_;
    Shape shape;
    for (int start = 1; start <= 10; ++start) {
      std::array<int, 5> ranks{};
      for (int i = 0; i < 5; ++i) ranks[i] = ordinal(rank_at_sequence(start + i));
      for (int mask = 0; mask < 32; ++mask) {
        if (std::popcount(static_cast<unsigned>(mask)) != k) continue;
        for (int suit = flush ? 0 : -1; suit < (flush ? kNumSuits : 0); ++suit) {
          bool ok = true;
          for (int i = 0; i < 5 && ok; ++i) {
            if (mask & (1 << i)) continue;
            ok = flush ? avail_[ranks[i]][suit] >= 1 : total_[ranks[i]] >= 1;
          }
          if (!ok) continue;
          shape = Shape{};
          shape.rank = {flush ? GroupType::kStraightFlush : GroupType::kStraight, start, 0};
          shape.key_rank = rank_at_sequence(start);
          shape.wilds = k;
          for (int i = 0; i < 5; ++i) {
            bool w = mask & (1 << i);
            shape.add(ranks[i], w ? 0 : 1, w ? 1 : 0, flush ? suit : -1);
          }
          sink(shape);
        }
      }
    }
  }

  template <typename Sink>
  void walk_runs(Sink& sink, GroupType type, int length, int width) {
    const int k = k_;
    const int last_start = 14 - length + 1;
    Shape shape;
    for (int start = 1; start <= last_start; ++start) {
      std::array<int, 3> ranks{};
      for (int i = 0; i < length; ++i) ranks[i] = ordinal(rank_at_sequence(start + i));
      // Spread k wilds over the slots, at most `width` per slot.
      std::array<int, 3> w{};
      auto visit = [&](auto&& self, int slot, int left) -> void {
        if (slot == length) {
          if (left != 0) return;
          for (int i = 0; i < length; ++i) {
            if (width - w[i] > total_[ranks[i]]) return;
          }
          shape = Shape{};
          shape.rank = {type, start, 0};
          shape.key_rank = rank_at_sequence(start);
          shape.wilds = k;
          for (int i = 0; i < length; ++i) shape.add(ranks[i], width - w[i], w[i]);
          sink(shape);
          return;
        }
        for (int x = 0; x <= std::min(left, width); ++x) {
          w[slot] = x;
          self(self, slot + 1, left - x);
        }
      };
      visit(visit, 0, k);
    }
  }

  const CardMultiset& hand_;
  Level level_;
  int wild_index_ = 0;
  int wilds_in_hand_ = 0;
  int k_ = 0;
  std::array<std::array<int, kNumSuits>, kNumRanks> avail_{};
  std::array<int, kNumRanks> total_{};
};

// Expands shapes into concrete card groups, deduplicating when wilds make
// two shapes coincide.
class GroupCollector {
 public:
  GroupCollector(ShapeWalker& walker, std::vector<CardGroup>& out)
      : walker_(walker), out_(out), dedup_(walker.wilds_in_hand() > 0) {}

  void operator()(const Shape& shape) {
    // Per-slot natural card choices, then their cartesian product.
    for (int i = 0; i < shape.num_slots; ++i) {
      const Slot& s = shape.slots[i];
      auto& picks = picks_[i];
      picks.clear();
      if (s.natural == 0) {
        picks.push_back(SuitPick{});
      } else if (s.rank >= kBlackJokerRank) {
        SuitPick p{};
        p[0] = static_cast<std::uint8_t>(s.natural);
        picks.push_back(p);
      } else if (s.suit >= 0) {
        if (walker_.avail(s.rank)[s.suit] < s.natural) return;
        SuitPick p{};
        p[s.suit] = static_cast<std::uint8_t>(s.natural);
        picks.push_back(p);
      } else {
        suit_choices(walker_.avail(s.rank), s.natural, picks);
        if (picks.empty()) return;
      }
    }
    std::array<int, 5> idx{};
    while (true) {
      emit(shape, idx);
      int i = shape.num_slots - 1;
      while (i >= 0 && ++idx[i] == static_cast<int>(picks_[i].size())) {
        idx[i] = 0;
        --i;
      }
      if (i < 0) break;
    }
  }

 private:
  void emit(const Shape& shape, const std::array<int, 5>& idx) {
    CardGroup g;
    g.type = shape.rank.type;
    g.key = shape.rank.key;
    g.bomb_size = shape.rank.bomb_size;
    g.key_rank = shape.key_rank;
    g.wilds_used = shape.wilds;
    if (shape.wilds > 0) g.cards.set_count(walker_.wild_index(), shape.wilds);
    int first_suit = -1;
    bool one_suit = true;
    for (int i = 0; i < shape.num_slots; ++i) {
      const Slot& s = shape.slots[i];
      const SuitPick& p = picks_[i][idx[i]];
      if (s.rank >= kBlackJokerRank) {
        int ci = s.rank == kBlackJokerRank ? kBlackJokerIndex : kRedJokerIndex;
        g.cards.set_count(ci, g.cards.count(ci) + p[0]);
        continue;
      }
      for (int su = 0; su < kNumSuits; ++su) {
        if (p[su] == 0) continue;
        int ci = 4 * s.rank + su;
        g.cards.set_count(ci, g.cards.count(ci) + p[su]);
        if (first_suit < 0) first_suit = su;
        if (su != first_suit) one_suit = false;
      }
    }
    if (g.type == GroupType::kStraight && shape.wilds == 0 && one_suit) return;  // that is a flush
    // Record what each wild stands for.
    int w = 0;
    for (int i = 0; i < shape.num_slots && w < shape.wilds; ++i) {
      const Slot& s = shape.slots[i];
      for (int j = 0; j < s.wilds; ++j) {
        int suit = 0;
        if (s.suit >= 0) {
          suit = s.suit;
        } else if (g.type == GroupType::kStraight && one_suit && first_suit >= 0) {
          suit = (first_suit + 1) % kNumSuits;
        }
        g.wild_as[w++] = Card(rank_from_ordinal(s.rank), static_cast<Suit>(suit));
      }
    }
    if (dedup_ && !seen_.insert(g).second) return;
    out_.push_back(std::move(g));
  }

  ShapeWalker& walker_;
  std::vector<CardGroup>& out_;
  bool dedup_;
  std::unordered_set<CardGroup, CardGroupHash, SameAction> seen_;
  std::array<std::vector<SuitPick>, 5> picks_;
};

std::vector<CardGroup> generate(const CardMultiset& hand, Level level, const std::optional<GroupRank>& to_beat) {
  std::vector<CardGroup> out;
  ShapeWalker walker(hand, level);
  GroupCollector collect(walker, out);
  auto allow = [&](GroupType t) {
    if (!to_beat) return true;
    GroupRank probe{t, 0, 0};
    if (to_beat->is_bomb_like()) return probe.is_bomb_like();
    return t == to_beat->type || probe.is_bomb_like();
  };
  auto sink = [&](const Shape& shape) {
    if (to_beat && !beats(shape.rank, *to_beat)) return;
    collect(shape);
  };
  for (int k = 0; k <= walker.wilds_in_hand(); ++k) {
    walker.set_acting_wilds(k);
    walker.walk(allow, sink);
  }
  return out;
}

std::string key_text(const CardGroup& g) { return rank_name(g.key_rank); }

}  // namespace

std::string_view group_type_name(GroupType type) {
  switch (type) {
    case GroupType::kPass: return "PASS";
    case GroupType::kSingle: return "SINGLE";
    case GroupType::kPair: return "PAIR";
    case GroupType::kTriple: return "TRIPLE";
    case GroupType::kTube: return "TUBE";
    case GroupType::kPlate: return "PLATE";
    case GroupType::kFullHouse: return "FULLHOUSE";
    case GroupType::kStraight: return "STRAIGHT";
    case GroupType::kBomb: return "BOMB";
    case GroupType::kStraightFlush: return "STRAIGHTFLUSH";
    case GroupType::kJokerBomb: return "JOKERBOMB";
  }
  return "?";
}

std::string CardGroup::to_string() const {
  if (is_pass()) return "PASS";
  std::string out(group_type_name(type));
  if (type == GroupType::kBomb) out += std::to_string(bomb_size);
  if (type != GroupType::kJokerBomb) out += "[" + key_text(*this) + "]";
  out += ": " + cards.to_string();
  return out;
}

CardGroup CardGroup::parse(std::string_view text, Level level) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text == "PASS") return pass();
  std::string_view head;
  std::string_view body = text;
  if (auto colon = text.find(':'); colon != std::string_view::npos) {
    head = trim(text.substr(0, colon));
    body = text.substr(colon + 1);
  }
  CardMultiset cards = CardMultiset::parse(body);
  if (cards.empty()) throw GuandanError("group has no cards: '" + std::string(text) + "'");
  std::vector<CardGroup> options = classify(cards, level);
  if (head.empty()) {
    if (options.size() != 1) {
      throw GuandanError("cards '" + std::string(body) + "' form " + std::to_string(options.size()) +
                         " groups; name one");
    }
    return options.front();
  }
  for (const CardGroup& g : options) {
    std::string name(group_type_name(g.type));
    if (g.type == GroupType::kBomb) name += std::to_string(g.bomb_size);
    if (g.type != GroupType::kJokerBomb) name += "[" + key_text(g) + "]";
    if (name == head) return g;
  }
  throw GuandanError("cards do not form " + std::string(head) + ": '" + std::string(text) + "'");
}

bool same_action(const CardGroup& a, const CardGroup& b) {
  return a.type == b.type && a.key == b.key && a.bomb_size == b.bomb_size && a.cards == b.cards;
}

std::size_t CardGroupHash::operator()(const CardGroup& g) const noexcept {
  std::uint64_t h = g.cards.hash();
  h ^= (static_cast<std::uint64_t>(g.type) << 16 | static_cast<std::uint64_t>(g.key) << 8 |
        static_cast<std::uint64_t>(g.bomb_size)) *
       0x9E3779B97F4A7C15ULL;
  return static_cast<std::size_t>(h);
}

std::vector<CardGroup> classify(const CardMultiset& cards, Level level) {
  std::vector<CardGroup> out;
  const int n = cards.size();
  if (n < 1 || n > kMaxGroupSize) return out;
  const int wild_index = card_index(wild_card(level));
  const int wilds = cards.count(wild_index);

  auto add = [&](GroupType type, int key, int bomb_size, Rank key_rank, int k) {
    for (const CardGroup& g : out) {
      if (g.type == type && g.key == key && g.bomb_size == bomb_size) return;
    }
    CardGroup g;
    g.type = type;
    g.key = key;
    g.bomb_size = bomb_size;
    g.key_rank = key_rank;
    g.cards = cards;
    g.wilds_used = k;
    out.push_back(g);
  };

  for (int k = 0; k <= wilds; ++k) {
    if (k == n) break;  // all-wild groups read as level cards only
    CardMultiset natural = cards;
    natural.set_count(wild_index, wilds - k);
    std::array<int, kNumRanks> rc{};
    std::array<int, kNumSuits> suit_count{};
    int distinct_ranks = 0;
    int only_rank = -1;
    for (int r = 0; r < kNumRanks; ++r) {
      rc[r] = natural.rank_count(rank_from_ordinal(r));
      if (rc[r] > 0) {
        ++distinct_ranks;
        only_rank = r;
      }
    }
    int nat_suits = 0;
    for (int i = 0; i < 4 * kNumSuitedRanks; ++i) suit_count[i % 4] += natural.count(i);
    for (int s = 0; s < kNumSuits; ++s) nat_suits += suit_count[s] > 0;
    const bool has_jokers = rc[kBlackJokerRank] + rc[kRedJokerRank] > 0;

    if (n == 1) {
      Card c = cards.cards().front();
      add(GroupType::kSingle, single_order(c.rank(), level), 0, c.rank(), 0);
      continue;
    }
    if (distinct_ranks == 1) {
      Rank r = rank_from_ordinal(only_rank);
      if (is_joker(r)) {
        if (n == 2 && k == 0) add(GroupType::kPair, single_order(r, level), 0, r, 0);
      } else if (n == 2) {
        add(GroupType::kPair, single_order(r, level), 0, r, k);
      } else if (n == 3) {
        add(GroupType::kTriple, single_order(r, level), 0, r, k);
      } else {
        add(GroupType::kBomb, single_order(r, level), n, r, k);
      }
    }
    if (n == 4 && k == 0 && rc[kBlackJokerRank] == 2 && rc[kRedJokerRank] == 2) {
      add(GroupType::kJokerBomb, 0, 0, Rank::kRedJoker, 0);
    }
    if (n == 5) {
      for (int t = 0; t < kNumSuitedRanks; ++t) {
        if (rc[t] > 3) continue;
        for (int p = 0; p < kNumRanks; ++p) {
          if (p == t || rc[p] > 2) continue;
          if (rc[t] + rc[p] != n - k) continue;  // nothing outside t and p
          if (p >= kBlackJokerRank && rc[p] != 2) continue;
          if (rc[t] == 0) continue;  // the triple needs a natural card
          add(GroupType::kFullHouse, single_order(rank_from_ordinal(t), level), 0, rank_from_ordinal(t), k);
        }
      }
      if (!has_jokers) {
        for (int start = 1; start <= 10; ++start) {
          int covered = 0;
          bool ok = true;
          for (int i = 0; i < 5; ++i) {
            int c = rc[ordinal(rank_at_sequence(start + i))];
            if (c > 1) ok = false;
            covered += c;
          }
          if (!ok || covered != n - k) continue;
          Rank kr = rank_at_sequence(start);
          if (nat_suits == 1) add(GroupType::kStraightFlush, start, 0, kr, k);
          if (nat_suits > 1 || k > 0) add(GroupType::kStraight, start, 0, kr, k);
        }
      }
    }
    if (n == 6 && !has_jokers) {
      for (int start = 1; start <= 12; ++start) {
        int covered = 0;
        bool ok = true;
        for (int i = 0; i < 3; ++i) {
          int c = rc[ordinal(rank_at_sequence(start + i))];
          if (c > 2) ok = false;
          covered += c;
        }
        if (ok && covered == n - k) add(GroupType::kTube, start, 0, rank_at_sequence(start), k);
      }
      for (int start = 1; start <= 13; ++start) {
        int covered = 0;
        bool ok = true;
        for (int i = 0; i < 2; ++i) {
          int c = rc[ordinal(rank_at_sequence(start + i))];
          if (c > 3) ok = false;
          covered += c;
        }
        if (ok && covered == n - k) add(GroupType::kPlate, start, 0, rank_at_sequence(start), k);
      }
    }
  }
  return out;
}

bool beats(const GroupRank& a, const GroupRank& b) {
  if (a.type == GroupType::kPass || b.type == GroupType::kPass) return false;
  const bool a_bomb = a.is_bomb_like(), b_bomb = b.is_bomb_like();
  if (a_bomb || b_bomb) {
    if (!a_bomb) return false;
    if (!b_bomb) return true;
    int ta = bomb_tier(a), tb = bomb_tier(b);
    if (ta != tb) return ta > tb;
    return a.key > b.key;
  }
  return a.type == b.type && a.key > b.key;
}

std::vector<CardGroup> enumerate_groups(const CardMultiset& hand, Level level) {
  return generate(hand, level, std::nullopt);
}

std::vector<CardGroup> legal_actions(const CardMultiset& hand, const std::optional<CardGroup>& to_beat,
                                     Level level) {
  if (!to_beat || to_beat->is_pass()) return generate(hand, level, std::nullopt);
  std::vector<CardGroup> out = generate(hand, level, to_beat->rank());
  out.push_back(CardGroup::pass());
  return out;
}

std::string check_action(const CardMultiset& hand, const std::optional<CardGroup>& to_beat, Level level,
                         const CardGroup& action) {
  const bool leading = !to_beat || to_beat->is_pass();
  if (action.is_pass()) return leading ? "cannot pass when leading a trick" : "";
  if (!hand.contains(action.cards)) return "cards not held: " + action.cards.to_string();
  bool interpretable = false;
  for (const CardGroup& g : classify(action.cards, level)) {
    if (g.rank() == action.rank()) interpretable = true;
  }
  if (!interpretable) return "cards do not form " + action.to_string();
  if (leading) return "";
  if (beats(action, *to_beat)) return "";
  if (!action.is_bomb_like() && action.type != to_beat->type) {
    return "wrong type: " + std::string(group_type_name(action.type)) + " cannot follow " +
           std::string(group_type_name(to_beat->type));
  }
  return "too small: " + action.to_string() + " does not beat " + to_beat->to_string();
}

std::array<bool, kNumWildFlags> wild_capabilities(const CardMultiset& hand, Level level) {
  std::array<bool, kNumWildFlags> flags{};
  ShapeWalker walker(hand, level);
  if (walker.wilds_in_hand() == 0) return flags;
  auto slot_of = [](GroupType t) {
    switch (t) {
      case GroupType::kPair: return 0;
      case GroupType::kTriple: return 1;
      case GroupType::kTube: return 2;
      case GroupType::kPlate: return 3;
      case GroupType::kFullHouse: return 4;
      case GroupType::kStraight: return 5;
      case GroupType::kBomb: return 6;
      case GroupType::kStraightFlush: return 7;
      default: return -1;
    }
  };
  std::array<std::optional<GroupRank>, 8> best_natural, best_wild;
  auto better = [](const std::optional<GroupRank>& cur, const GroupRank& g) {
    if (!cur) return true;
    if (g.type == GroupType::kBomb || cur->type == GroupType::kBomb) return beats(g, *cur);
    return g.key > cur->key;
  };
  auto allow = [&](GroupType t) { return slot_of(t) >= 0; };
  for (int k = 0; k <= walker.wilds_in_hand(); ++k) {
    walker.set_acting_wilds(k);
    walker.walk(allow, [&](const Shape& shape) {
      int s = slot_of(shape.rank.type);
      if (s < 0) return;
      auto& best = shape.wilds > 0 ? best_wild[s] : best_natural[s];
      if (better(best, shape.rank)) best = shape.rank;
    });
  }
  for (int s = 0; s < 8; ++s) {
    flags[s] = best_wild[s].has_value();
    if (best_wild[s] && best_natural[s] && better(best_natural[s], *best_wild[s])) flags[8] = true;
  }
  return flags;
}

}  // namespace guandan
