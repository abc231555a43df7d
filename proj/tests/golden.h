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

// The fixed trajectory behind tests/data/features_golden.bin.

#ifndef GUANDAN_TESTS_GOLDEN_H_
#define GUANDAN_TESTS_GOLDEN_H_

#include <vector>

#include "guandan/features.h"

namespace guandan::testing {

inline constexpr std::uint64_t kGoldenSeed = 20260101;
inline constexpr int kGoldenSteps = 120;

// One input vector (state ++ chosen action) per decision, first legal action
// picked by a simple counter so the sequence needs no RNG beyond the deal.
inline std::vector<std::vector<float>> golden_inputs() {
  std::vector<std::vector<float>> out;
  Game g = Game::new_episode(kGoldenSeed);
  for (int t = 0; t < kGoldenSteps; ++t) {
    if (g.round_over()) {
      if (g.episode_over()) break;
      g.finish_round();
    }
    auto legal = g.legal_actions();
    const auto& a = legal[(t * 7) % legal.size()];
    auto x = encode_input(encode_state(g.observe(g.current_player())), a);
    out.emplace_back(x.begin(), x.end());
    g.step(a);
  }
  return out;
}

}  // namespace guandan::testing

#endif  // GUANDAN_TESTS_GOLDEN_H_
