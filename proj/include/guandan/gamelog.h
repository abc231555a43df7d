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

// JSONL game logs. One object per line:
//
//   {"type":"move","episode":0,"seed":7,"round":1,"turn":1,"player":0,
//    "action":"PAIR[Q]: SQ DQ","hands_remaining":[25,27,27,27]}
//   {"type":"round_end","episode":0,"round":1,"finish_order":[...],
//    "rewards":[...],"levels":["3","2"],"promotion":1}
//   {"type":"episode_end","episode":0,"seed":7,"rounds":9,"winning_team":0}
//
// The deal and tribute follow from the seed, so a log replays through a
// fresh engine.

#ifndef GUANDAN_GAMELOG_H_
#define GUANDAN_GAMELOG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "guandan/evalharness.h"

namespace guandan {

struct SimulateOptions {
  std::uint64_t base_seed = 1;
  int max_rounds = 500;
};

// Plays one episode with `team0` on seats 0/2 and `team1` on 1/3, checking
// engine invariants after every move. Returns the episode's log lines.
std::string simulate_episode(const Policy& team0, const Policy& team1, int episode, std::uint64_t seed,
                             int max_rounds);

// Episodes 0..n-1 with seeds base_seed + i, concatenated in order.
std::string simulate(const Policy& team0, const Policy& team1, int n_games, const SimulateOptions& options);

struct ReplayReport {
  int episodes = 0;
  std::uint64_t moves = 0;
  std::vector<std::string> errors;  // empty when every line matched
};

// Re-runs every logged episode through the engine and compares each field.
ReplayReport replay_log(std::string_view jsonl);

}  // namespace guandan

#endif  // GUANDAN_GAMELOG_H_
