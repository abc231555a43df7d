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

#ifndef GUANDAN_CONFIG_H_
#define GUANDAN_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "guandan/cards.h"

namespace guandan {

class ConfigError : public GuandanError {
 public:
  using GuandanError::GuandanError;
};

// Run manifest. File form is INI-style:
//
//   [run]      seed, out_dir, actors, max_minutes, max_transitions
//   [actor]    epsilon, sync_period, max_rounds
//   [learner]  lambda, batch, capacity, lr, optimizer, steps, warmup,
//              max_replay_ratio, publish_every, checkpoint_every, metrics_every
//   [net]      hidden (comma-separated widths)
struct TrainConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "run";
  int actors = 4;
  double max_minutes = 0;             // 0 = no time limit
  std::int64_t max_transitions = 0;   // 0 = no limit

  double epsilon = 0.05;
  int sync_period = 1;
  int max_rounds = 200;

  double lambda = 0.2;
  int batch = 512;
  std::int64_t capacity = 1000000;
  double lr = 1e-4;
  std::string optimizer = "adam";
  std::int64_t steps = 0;             // 0 = no step limit
  std::int64_t warmup = 0;            // transitions before the first step; 0 = one batch
  double max_replay_ratio = 0;        // cap on sampled / received transitions; 0 = none
  int publish_every = 1;
  int checkpoint_every = 1000;
  int metrics_every = 50;

  std::vector<int> hidden{512, 512, 512, 512, 512};

  // Throws ConfigError naming the first bad field.
  void validate() const;
  std::vector<int> widths() const;
  bool operator==(const TrainConfig&) const = default;
};

// Unknown sections or keys and unparsable values throw ConfigError.
TrainConfig parse_train_config(const std::string& text);
TrainConfig load_train_config(const std::string& path);
std::string format_train_config(const TrainConfig& config);

}  // namespace guandan

#endif  // GUANDAN_CONFIG_H_
