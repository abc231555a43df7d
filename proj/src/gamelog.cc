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

#include "guandan/gamelog.h"

#include <map>
#include <sstream>

#include "json.hpp"

namespace guandan {
namespace {

using json = nlohmann::ordered_json;

json hand_sizes(const Game& g) {
  json out = json::array();
  for (const auto& h : g.round().hands) out.push_back(h.size());
  return out;
}

json levels_of(const std::array<Level, 2>& lv) { return {rank_name(lv[0].rank()), rank_name(lv[1].rank())}; }

}  // namespace

std::string simulate_episode(const Policy& team0, const Policy& team1, int episode, std::uint64_t seed,
                             int max_rounds) {
  std::string out;
  std::mt19937_64 rng(seed);
  Game g = Game::new_episode(seed);
  int rounds = 0;
  while (!g.episode_over()) {
    if (rounds >= max_rounds) throw GuandanError("episode exceeded round cap");
    int turn = 0;
    const int round = g.episode().round_index;
    while (!g.round_over()) {
      const PlayerId p = g.current_player();
      auto legal = g.legal_actions();
      const Policy& pol = team_of(p) == 0 ? team0 : team1;
      CardGroup action = pol.act(g.observe(p), legal, rng);
      g.step(action);
      g.check_invariants();
      json line = {{"type", "move"},   {"episode", episode},          {"seed", seed},
                   {"round", round},   {"turn", ++turn},              {"player", p},
                   {"action", action.to_string()}, {"hands_remaining", hand_sizes(g)}};
      out += line.dump() + "\n";
    }
    auto s = g.finish_round();
    ++rounds;
    json end = {{"type", "round_end"},
                {"episode", episode},
                {"round", round},
                {"finish_order", s.finish_order},
                {"rewards", s.rewards},
                {"levels", levels_of(s.levels_after)},
                {"promotion", s.promotion}};
    out += end.dump() + "\n";
  }
  json done = {{"type", "episode_end"},
               {"episode", episode},
               {"seed", seed},
               {"rounds", rounds},
               {"winning_team", g.episode().winning_team}};
  out += done.dump() + "\n";
  return out;
}

std::string simulate(const Policy& team0, const Policy& team1, int n_games, const SimulateOptions& options) {
  if (n_games < 1) throw GuandanError("simulate needs at least one game");
  std::vector<std::string> logs(static_cast<std::size_t>(n_games));
  std::vector<std::string> errors(static_cast<std::size_t>(n_games));
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n_games; ++i) {
    try {
      logs[i] = simulate_episode(team0, team1, i, options.base_seed + static_cast<std::uint64_t>(i),
                                 options.max_rounds);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  std::string out;
  for (int i = 0; i < n_games; ++i) {
    if (!errors[i].empty()) throw GuandanError("episode " + std::to_string(i) + ": " + errors[i]);
    out += logs[i];
  }
  return out;
}

ReplayReport replay_log(std::string_view jsonl) {
  ReplayReport rep;
  std::istringstream in{std::string(jsonl)};
  std::string text;
  std::optional<Game> game;
  int episode = -1;
  int line_no = 0;
  auto fail = [&](const std::string& what) { rep.errors.push_back("line " + std::to_string(line_no) + ": " + what); };
  while (std::getline(in, text)) {
    ++line_no;
    if (text.empty()) continue;
    try {
      const json j = json::parse(text);
      const std::string type = j.at("type");
      const int ep = j.at("episode");
      if (ep != episode) {
        if (type != "move") {
          fail("episode " + std::to_string(ep) + " does not start with a move");
          continue;
        }
        episode = ep;
        game = Game::new_episode(j.at("seed").get<std::uint64_t>());
        rep.episodes++;
      }
      if (!game) continue;
      Game& g = *game;
      if (type == "move") {
        if (j.at("round").get<int>() != g.episode().round_index) fail("round index mismatch");
        if (j.at("player").get<int>() != g.current_player()) fail("player out of turn");
        g.step(CardGroup::parse(j.at("action").get<std::string>(), g.round().round_level));
        g.check_invariants();
        if (j.at("hands_remaining") != hand_sizes(g)) fail("hands_remaining mismatch");
        rep.moves++;
      } else if (type == "round_end") {
        if (!g.round_over()) {
          fail("round_end before the round finished");
          game.reset();
          continue;
        }
        auto s = g.finish_round();
        if (j.at("finish_order") != json(s.finish_order)) fail("finish order mismatch");
        if (j.at("rewards") != json(s.rewards)) fail("reward mismatch");
        if (j.at("levels") != levels_of(s.levels_after)) fail("level mismatch");
        if (j.at("promotion").get<int>() != s.promotion) fail("promotion mismatch");
      } else if (type == "episode_end") {
        if (!g.episode_over()) fail("episode_end before the episode finished");
        if (j.at("winning_team").get<int>() != g.episode().winning_team) fail("winner mismatch");
        game.reset();
      } else {
        fail("unknown event type " + type);
      }
    } catch (const std::exception& e) {
      fail(e.what());
      game.reset();
    }
  }
  if (game) fail("log ends inside episode " + std::to_string(episode));
  return rep;
}

}  // namespace guandan
