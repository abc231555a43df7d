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

// One learner process, N actor processes, Unix stream sockets between them.

#ifndef GUANDAN_DISTRIBUTED_H_
#define GUANDAN_DISTRIBUTED_H_

#include <cstdint>
#include <string>
#include <vector>

#include "guandan/config.h"

namespace guandan {

struct ActorReport {
  std::uint32_t id = 0;
  std::uint64_t episodes = 0;
  std::uint64_t transitions = 0;
  std::uint64_t failed_episodes = 0;
  std::uint64_t first_version = 0;
  std::uint64_t last_version = 0;
  bool versions_monotone = true;
  bool reported = false;  // STATS frame received
  int exit_code = -1;
};

struct TrainSummary {
  std::int64_t steps = 0;
  std::uint64_t final_version = 0;
  std::uint64_t transitions = 0;
  std::uint64_t episodes = 0;
  std::uint64_t frames = 0;
  std::uint64_t corrupt_frames = 0;
  std::uint64_t sequence_gaps = 0;
  std::uint64_t unknown_versions = 0;    // transition versions never published
  std::uint64_t nonmonotone_versions = 0;  // per-actor version went backwards
  std::uint64_t bad_transitions = 0;     // reward or seat out of range
  std::uint64_t published_versions = 0;
  bool interrupted = false;
  bool actors_converged = false;  // every actor's final version equals final_version
  std::string fault;              // set when the run could not continue
  double elapsed_s = 0;
  std::vector<ActorReport> actors;
  std::vector<std::string> checkpoints;

  bool integrity_ok() const;
};

// Runs the learner and spawns `config.actors` copies of
// `actor_executable actor ...`. Returns after a clean stop (step, time or
// transition budget reached, or SIGINT/SIGTERM). Writes metrics.jsonl,
// checkpoints/ and summary.json under config.out_dir.
TrainSummary run_learner(const TrainConfig& config, const std::string& actor_executable);

struct ActorProcessOptions {
  std::string socket_path;
  std::uint32_t id = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.05;
  int sync_period = 1;
  int max_rounds = 200;
  std::int64_t max_episodes = 0;  // 0 = until told to stop
};

// The actor side; returns a process exit code.
int run_actor_process(const ActorProcessOptions& options);

}  // namespace guandan

#endif  // GUANDAN_DISTRIBUTED_H_
