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

#include "guandan/features.h"

#include <algorithm>

#include "guandan/binio.h"

namespace guandan {
namespace {

constexpr std::uint32_t kFixtureMagic = 0x58464447;  // "GDFX"
constexpr std::uint32_t kFixtureVersion = 1;

void put_cards(StateVector& v, int offset, const CardMultiset& cards) {
  for (int i = 0; i < kNumCards; ++i) v[offset + i] = static_cast<float>(cards.count(i));
}

}  // namespace

std::array<PlayerId, 3> others_in_order(PlayerId viewer) {
  return {(viewer + 1) % kNumPlayers, (viewer + 2) % kNumPlayers, (viewer + 3) % kNumPlayers};
}

StateVector encode_state(const Observation& obs) {
  StateVector v{};
  put_cards(v, seg::kHand, obs.hand);

  CardMultiset seen = obs.hand;
  for (const auto& p : obs.played) {
    for (int i = 0; i < kNumCards; ++i) {
      if (seen.count(i) + p.count(i) > kDeckCopies) throw GuandanError("observation holds more than two copies of a card");
    }
    seen += p;
  }
  put_cards(v, seg::kRemaining, CardMultiset::full_deck() - seen);

  if (obs.to_beat) put_cards(v, seg::kToBeat, obs.to_beat->cards);

  if (obs.partner_finished) {
    std::fill(v.begin() + seg::kPartnerMove, v.begin() + seg::kPartnerMove + kNumCards, -1.0f);
  } else if (obs.partner_last_move) {
    put_cards(v, seg::kPartnerMove, obs.partner_last_move->cards);
  }

  const auto others = others_in_order(obs.viewer);
  for (int k = 0; k < 3; ++k) {
    int left = obs.remaining[others[k]];
    if (left < 0 || left > kHandSize) throw GuandanError("remaining count out of range");
    v[seg::kCounts + k * kCountSlots + left] = 1.0f;
    put_cards(v, seg::kPlayed + k * kNumCards, obs.played[others[k]]);
  }

  const int team = team_of(obs.viewer);
  v[seg::kLevels + obs.team_levels[team].ordinal()] = 1.0f;
  v[seg::kLevels + kNumSuitedRanks + obs.team_levels[1 - team].ordinal()] = 1.0f;
  v[seg::kLevels + 2 * kNumSuitedRanks + obs.round_level.ordinal()] = 1.0f;

  const int wilds = obs.hand.count(wild_card(obs.round_level));
  v[seg::kWild] = wilds >= 1 ? 1.0f : 0.0f;
  v[seg::kWild + 1] = wilds >= 2 ? 1.0f : 0.0f;
  if (wilds > 0) {
    auto caps = wild_capabilities(obs.hand, obs.round_level);
    for (int i = 0; i < kNumWildFlags; ++i) v[seg::kWild + 2 + i] = caps[i] ? 1.0f : 0.0f;
  }
  return v;
}

ActionVector encode_action(const CardGroup& action) {
  ActionVector a{};
  for (int i = 0; i < kNumCards; ++i) a[i] = static_cast<float>(action.cards.count(i));
  return a;
}

InputVector encode_input(const StateVector& state, const CardGroup& action) {
  InputVector x;
  std::copy(state.begin(), state.end(), x.begin());
  auto a = encode_action(action);
  std::copy(a.begin(), a.end(), x.begin() + kStateDim);
  return x;
}

std::string serialize_vectors(const std::vector<std::vector<float>>& vectors) {
  ByteWriter w;
  w.put(kFixtureMagic);
  w.put(kFixtureVersion);
  w.put(static_cast<std::uint32_t>(vectors.size()));
  for (const auto& v : vectors) {
    w.put(static_cast<std::uint32_t>(v.size()));
    w.put_span(std::span<const float>(v));
  }
  return std::move(w.str());
}

std::vector<std::vector<float>> parse_vectors(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.get<std::uint32_t>() != kFixtureMagic) throw FormatError("bad fixture magic", 0);
  if (r.get<std::uint32_t>() != kFixtureVersion) throw FormatError("unsupported fixture version", 4);
  const auto count = r.get<std::uint32_t>();
  std::vector<std::vector<float>> out;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = r.get<std::uint32_t>();
    if (len > r.remaining() / sizeof(float)) r.fail("vector length exceeds file");
    std::vector<float> v(len);
    r.get_span(std::span<float>(v));
    out.push_back(std::move(v));
  }
  if (!r.done()) r.fail("trailing bytes");
  return out;
}

void write_fixture(const std::string& path, const std::vector<std::vector<float>>& vectors) {
  write_file(path, serialize_vectors(vectors));
}

std::vector<std::vector<float>> read_fixture(const std::string& path) { return parse_vectors(read_file(path)); }

}  // namespace guandan
