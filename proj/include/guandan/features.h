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

#ifndef GUANDAN_FEATURES_H_
#define GUANDAN_FEATURES_H_

#include <array>
#include <string>
#include <vector>

#include "guandan/engine.h"

namespace guandan {

inline constexpr int kStateDim = 513;
inline constexpr int kActionDim = 54;
inline constexpr int kInputDim = kStateDim + kActionDim;
inline constexpr int kCountSlots = kHandSize + 1;  // 0..27 cards left

// Segment offsets into the state vector. "Others" are the three other seats
// in play order starting from the one after the viewer.
namespace seg {
inline constexpr int kHand = 0;
inline constexpr int kRemaining = 54;
inline constexpr int kToBeat = 108;
inline constexpr int kPartnerMove = 162;
inline constexpr int kCounts = 216;   // 3 x 28 one-hots
inline constexpr int kPlayed = 300;   // 3 x 54
inline constexpr int kLevels = 462;   // own team 13, opponents 13, round 13, 1 spare
inline constexpr int kWild = 502;     // holds >= 1, holds 2, 9 capability flags
inline constexpr int kEnd = 513;
}  // namespace seg

using StateVector = std::array<float, kStateDim>;
using ActionVector = std::array<float, kActionDim>;
using InputVector = std::array<float, kInputDim>;

// Throws GuandanError if the observation breaks card conservation.
StateVector encode_state(const Observation& obs);
// Pass encodes as all zeros.
ActionVector encode_action(const CardGroup& action);
InputVector encode_input(const StateVector& state, const CardGroup& action);

// The other seats in encoding order.
std::array<PlayerId, 3> others_in_order(PlayerId viewer);

// Golden-vector files: "GDFX", u32 version, u32 count, then per vector a
// u32 length and that many float32, all little-endian.
std::string serialize_vectors(const std::vector<std::vector<float>>& vectors);
std::vector<std::vector<float>> parse_vectors(std::string_view bytes);
void write_fixture(const std::string& path, const std::vector<std::vector<float>>& vectors);
std::vector<std::vector<float>> read_fixture(const std::string& path);

}  // namespace guandan

#endif  // GUANDAN_FEATURES_H_
