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

#include <random>
#include <set>

#include "doctest.h"
#include "oracle.h"
#include "test_util.h"

namespace guandan {
namespace {

const Level kTwo(Rank::kTwo);
const Level kFive(Rank::kFive);

CardMultiset cards(const char* text) { return CardMultiset::parse(text); }

CardGroup group(const char* text, Level level = kTwo) { return CardGroup::parse(text, level); }

std::set<oracle::RankKey> ranks_of(const std::vector<CardGroup>& groups) {
  std::set<oracle::RankKey> out;
  for (const auto& g : groups) out.insert(oracle::key_of(g.rank()));
  return out;
}

std::set<oracle::ActionKey> actions_of(const std::vector<CardGroup>& groups) {
  std::set<oracle::ActionKey> out;
  for (const auto& g : groups) out.insert(oracle::action_key(g));
  return out;
}

TEST_CASE("classify: joker bomb, natural bomb, wild triple, nothing") {
  auto jb = classify(cards("BJ BJ RJ RJ"), kTwo);
  REQUIRE(jb.size() == 1);
  CHECK(jb[0].type == GroupType::kJokerBomb);

  auto bomb = classify(cards("H7 S7 D7 C7"), kTwo);
  REQUIRE(bomb.size() == 1);
  CHECK(bomb[0].type == GroupType::kBomb);
  CHECK(bomb[0].bomb_size == 4);
  CHECK(bomb[0].key_rank == Rank::kSeven);

  auto triple = classify(cards("H5 S9 D9"), kFive);
  REQUIRE(triple.size() == 1);
  CHECK(triple[0].type == GroupType::kTriple);
  CHECK(triple[0].key_rank == Rank::kNine);
  CHECK(triple[0].wilds_used == 1);
  CHECK(ranks_of(triple) == oracle::classify_brute(cards("H5 S9 D9"), kFive));

  CHECK(classify(cards("S3 D4"), kTwo).empty());
}

TEST_CASE("classify: full house keyed by its triple") {
  auto fh = classify(cards("S3 D3 C3 SK DK"), kTwo);
  REQUIRE(fh.size() == 1);
  CHECK(fh[0].type == GroupType::kFullHouse);
  CHECK(fh[0].key_rank == Rank::kThree);
  auto higher = classify(cards("S4 D4 C4 S2 D2"), kTwo);
  REQUIRE(higher.size() == 1);
  CHECK(beats(higher[0], fh[0]));
  CHECK_FALSE(beats(fh[0], higher[0]));
}

TEST_CASE("classify: aces run low and high") {
  auto low = classify(cards("SA D2 C3 S4 D5"), kTwo);
  REQUIRE(low.size() == 1);
  CHECK(low[0].type == GroupType::kStraight);
  CHECK(low[0].key == 1);
  auto next = classify(cards("S2 D3 C4 S5 D6"), kTwo);
  REQUIRE(next.size() == 1);
  CHECK(beats(next[0], low[0]));
  auto high = classify(cards("ST DJ CQ SK DA"), kTwo);
  REQUIRE(high.size() == 1);
  CHECK(high[0].key == 10);
  CHECK(beats(high[0], next[0]));
  CHECK(classify(cards("SQ DK CA S2 D3"), kFive).empty());  // no wrap-around

  auto tube = classify(cards("SA DA S2 D2 S3 D3"), kFive);
  REQUIRE(tube.size() == 1);
  CHECK(tube[0].type == GroupType::kTube);
  CHECK(tube[0].key == 1);
  auto plate = classify(cards("SK DK CK SA DA CA"), kFive);
  REQUIRE(plate.size() == 1);
  CHECK(plate[0].type == GroupType::kPlate);
  CHECK(plate[0].key == 13);
}

TEST_CASE("classify: a single suit run is a straight flush, not a straight") {
  auto sf = classify(cards("S4 S5 S6 S7 S8"), kTwo);
  REQUIRE(sf.size() == 1);
  CHECK(sf[0].type == GroupType::kStraightFlush);
  // With a wild, both readings exist: the wild may take the flush suit or not.
  auto both = classify(cards("H2 S5 S6 S7 S8"), kTwo);
  CHECK(ranks_of(both).size() == 4);  // SF and Straight, starting at 4 or 5
  CHECK(ranks_of(both) == oracle::classify_brute(cards("H2 S5 S6 S7 S8"), kTwo));
}

TEST_CASE("wilds: alone they are level singles; never jokers") {
  auto single = classify(cards("H5"), kFive);
  REQUIRE(single.size() == 1);
  CHECK(single[0].type == GroupType::kSingle);
  CHECK(single[0].key == single_order(Rank::kFive, kFive));
  auto pair = classify(cards("H5 H5"), kFive);
  REQUIRE(pair.size() == 1);
  CHECK(pair[0].key_rank == Rank::kFive);
  CHECK(classify(cards("H5 BJ"), kFive).empty());
  CHECK(classify(cards("H5 BJ BJ RJ"), kFive).empty());
}

TEST_CASE("beats: every quoted rule") {
  CardGroup joker_bomb = group("BJ BJ RJ RJ");
  CardGroup bomb8 = group("H7 H7 S7 S7 D7 D7 C7 C7");
  CardGroup bomb6 = group("H9 H9 S9 S9 D9 D9");
  CardGroup bomb5 = group("H9 S9 S9 D9 D9");
  CardGroup bomb4 = group("H9 S9 D9 C9");
  CardGroup flush = group("S4 S5 S6 S7 S8");
  CardGroup bomb5_three = group("H3 S3 D3 C3 C3");
  CardGroup bomb4_ace = group("HA SA DA CA");

  SUBCASE("joker bomb beats any card type") {
    CHECK(beats(joker_bomb, bomb8));
    CHECK(beats(joker_bomb, flush));
    CHECK(beats(joker_bomb, group("S3")));
    CHECK_FALSE(beats(bomb8, joker_bomb));
  }
  SUBCASE("straight flush covers bombs of fewer than six cards only") {
    CHECK(beats(flush, bomb4));
    CHECK(beats(flush, bomb5));
    CHECK_FALSE(beats(flush, bomb6));
    CHECK(beats(bomb6, flush));
    CHECK_FALSE(beats(bomb5, flush));
  }
  SUBCASE("more cards beat fewer; equal sizes by rank") {
    CHECK(beats(bomb5_three, bomb4_ace));
    CHECK_FALSE(beats(bomb4_ace, bomb5_three));
    CHECK(beats(bomb4_ace, bomb4));
    CHECK(beats(bomb8, bomb6));
  }
  SUBCASE("bombs cover plain types; plain types only cover their own type") {
    CHECK(beats(bomb4, group("SK DK CK SA DA")));
    CHECK_FALSE(beats(group("SA DA"), group("S3 D3 C3")));
    CHECK_FALSE(beats(group("SA DA"), bomb4));
  }
  SUBCASE("strict order within a type") {
    CHECK_FALSE(beats(group("S9 D9"), group("H9 C9")));
    CHECK(beats(group("S9 D9"), group("H8 C8")));
  }
  SUBCASE("level card single sits just below the jokers") {
    Level seven(Rank::kSeven);
    CHECK(beats(group("S7", seven), group("SA", seven)));
    CHECK(beats(group("BJ", seven), group("S7", seven)));
    CHECK(beats(group("RJ", seven), group("BJ", seven)));
    CHECK_FALSE(beats(group("SA", seven), group("S7", seven)));
  }
}

TEST_CASE("beats is irreflexive and antisymmetric") {
  std::mt19937_64 rng(11);
  std::vector<CardGroup> pool;
  for (int i = 0; i < 30; ++i) {
    Level level = kTwo;
    auto gs = enumerate_groups(testing::clustered_hand(rng, 12, level), level);
    for (int j = 0; j < 10 && !gs.empty(); ++j) pool.push_back(gs[rng() % gs.size()]);
  }
  for (const auto& a : pool) {
    CHECK_FALSE(beats(a, a));
    for (const auto& b : pool) CHECK_FALSE((beats(a, b) && beats(b, a)));
  }
}

TEST_CASE("enumerate_groups examples") {
  auto one = enumerate_groups(cards("S3"), kTwo);
  REQUIRE(one.size() == 1);
  CHECK(one[0].type == GroupType::kSingle);
  CHECK(one[0].key_rank == Rank::kThree);

  auto tubes = enumerate_groups(cards("S3 D3 H4 S4 C5 D5"), kTwo);
  bool found = false;
  for (const auto& g : tubes) found |= g.type == GroupType::kTube && g.key_rank == Rank::kThree;
  CHECK(found);
  CHECK(actions_of(tubes) == oracle::legal_actions_brute(cards("S3 D3 H4 S4 C5 D5"), std::nullopt, kTwo));

  CHECK(enumerate_groups(CardMultiset(), kTwo).empty());
}

TEST_CASE("legal_actions examples") {
  auto lead = legal_actions(cards("S3"), std::nullopt, kTwo);
  REQUIRE(lead.size() == 1);
  CHECK(lead[0].type == GroupType::kSingle);

  auto follow = legal_actions(cards("S3"), group("S9"), kTwo);
  REQUIRE(follow.size() == 1);
  CHECK(follow[0].is_pass());

  auto cover = legal_actions(cards("HA SA H7 S7 D7 C7"), group("SK DK"), kTwo);
  std::set<std::string> names;
  for (const auto& g : cover) names.insert(g.to_string());
  CHECK(names == std::set<std::string>{"PAIR[A]: HA SA", "BOMB4[7]: H7 S7 D7 C7", "PASS"});
  CHECK(actions_of(cover) == oracle::legal_actions_brute(cards("HA SA H7 S7 D7 C7"), group("SK DK"), kTwo));
}

TEST_CASE("legal_actions matches brute force on random hands") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    Level level = testing::random_level(rng);
    int size = 1 + static_cast<int>(rng() % 12);
    CardMultiset hand = trial % 2 ? testing::clustered_hand(rng, size, level) : testing::random_hand(rng, size);
    auto to_beat = testing::random_to_beat(rng, level);
    auto got = actions_of(legal_actions(hand, to_beat, level));
    auto want = oracle::legal_actions_brute(hand, to_beat, level);
    INFO("hand=", hand.to_string(), " level=", rank_name(level.rank()),
         " to_beat=", to_beat ? to_beat->to_string() : "none");
    CHECK(got == want);
  }
}

TEST_CASE("classify matches brute force and is construction independent") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 400; ++trial) {
    Level level = testing::random_level(rng);
    int size = 1 + static_cast<int>(rng() % 10);
    CardMultiset m = testing::clustered_hand(rng, size, level);
    CHECK(ranks_of(classify(m, level)) == oracle::classify_brute(m, level));
    auto list = m.cards();
    std::shuffle(list.begin(), list.end(), rng);
    CHECK(ranks_of(classify(CardMultiset::from_cards(list), level)) == ranks_of(classify(m, level)));
  }
}

TEST_CASE("generated groups respect the hand and the wild budget") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    Level level = testing::random_level(rng);
    CardMultiset hand = testing::clustered_hand(rng, 27, level);
    for (const auto& g : enumerate_groups(hand, level)) {
      CHECK(hand.contains(g.cards));
      CHECK(g.wilds_used <= g.cards.count(wild_card(level)));
      if (g.type == GroupType::kJokerBomb) CHECK(g.wilds_used == 0);
      for (int i = 0; i < g.wilds_used; ++i) CHECK_FALSE(is_joker(g.wild_as[i].rank()));
    }
  }
}

TEST_CASE("group text round trips through parse") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    Level level = testing::random_level(rng);
    auto groups = enumerate_groups(testing::clustered_hand(rng, 14, level), level);
    for (const auto& g : groups) {
      CardGroup back = CardGroup::parse(g.to_string(), level);
      CHECK(same_action(back, g));
    }
  }
  CHECK(CardGroup::parse("PASS", kTwo).is_pass());
  CHECK_THROWS_AS(CardGroup::parse("PAIR[9]: S9 D8", kTwo), GuandanError);
}

TEST_CASE("check_action describes violations") {
  CardMultiset hand = cards("S3 D3 SK");
  CHECK(check_action(hand, std::nullopt, kTwo, group("S3 D3")).empty());
  CHECK(check_action(hand, std::nullopt, kTwo, CardGroup::pass()).find("leading") != std::string::npos);
  CHECK(check_action(hand, std::nullopt, kTwo, group("SA")).find("not held") != std::string::npos);
  CHECK(check_action(hand, group("S9"), kTwo, group("S3")).find("too small") != std::string::npos);
  CHECK(check_action(hand, group("S9"), kTwo, group("S3 D3")).find("wrong type") != std::string::npos);
  CHECK(check_action(hand, group("S9"), kTwo, CardGroup::pass()).empty());
}

TEST_CASE("wild capabilities") {
  auto none = wild_capabilities(cards("S3 S4 S5"), kTwo);
  for (bool f : none) CHECK_FALSE(f);
  // Level 2: H2 turns S3 S4 S6 S7 into a straight flush and 9 9 9 into a bomb.
  auto caps = wild_capabilities(cards("H2 S3 S4 S6 S7 S9 D9 C9"), kTwo);
  CHECK(caps[7]);  // straight flush
  CHECK(caps[6]);  // bomb
  CHECK(caps[5]);  // straight
  CHECK(caps[0]);  // pair
}

}  // namespace
}  // namespace guandan
