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

// Actor <-> learner frames: [u32 length][u8 kind][payload], length counting
// the kind byte and the payload.

#ifndef GUANDAN_WIRE_H_
#define GUANDAN_WIRE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "guandan/training.h"

namespace guandan {

enum class FrameKind : std::uint8_t {
  kTrajectory = 1,  // actor -> learner
  kParams = 2,      // learner -> actor, reply to HELLO
  kHello = 3,       // actor -> learner, asks for newer parameters
  kStats = 4,       // actor -> learner, JSON summary before leaving
};

inline constexpr std::uint32_t kMaxFrameBytes = 256u << 20;

struct Frame {
  FrameKind kind;
  std::string payload;
};

std::string encode_frame(FrameKind kind, std::string_view payload);

// Blocking socket I/O. write_frame throws GuandanError when the peer is gone.
// read_frame returns nullopt on a clean close between frames and throws
// FormatError on an oversized or unknown frame.
void write_frame(int fd, FrameKind kind, std::string_view payload);
std::optional<Frame> read_frame(int fd);

// TRAJECTORY payload: u32 actor, u64 sequence number, u64 episode seed,
// u32 count, packed transitions, u32 crc32 of all preceding payload bytes.
struct TrajectoryBatch {
  std::uint32_t actor_id = 0;
  std::uint64_t sequence = 0;
  std::uint64_t episode_seed = 0;
  std::vector<Transition> transitions;
};
std::string encode_trajectory(const TrajectoryBatch& batch);
TrajectoryBatch decode_trajectory(std::string_view payload);

inline constexpr std::size_t kPackedTransitionBytes = kStateDim + kActionDim + 4 + 4 + 8 + 1 + 2;

// HELLO payload: u32 actor, u64 version held (UINT64_MAX when none).
struct Hello {
  std::uint32_t actor_id = 0;
  std::uint64_t have_version = UINT64_MAX;
};
std::string encode_hello(const Hello& h);
Hello decode_hello(std::string_view payload);

// PARAMS payload: u8 flags (bit 0: stop), u64 latest version, then a
// checkpoint blob, empty when the actor already holds the latest version.
struct ParamsMessage {
  bool stop = false;
  std::uint64_t version = 0;
  std::string checkpoint;
};
std::string encode_params(const ParamsMessage& m);
ParamsMessage decode_params(std::string_view payload);

}  // namespace guandan

#endif  // GUANDAN_WIRE_H_
