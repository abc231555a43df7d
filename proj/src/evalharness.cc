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

#include "guandan/evalharness.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "guandan/features.h"
#include "guandan/training.h"

namespace guandan {
namespace {

namespace fs = std::filesystem;

bool is_sequence(GroupType t) {
  return t == GroupType::kStraight || t == GroupType::kStraightFlush || t == GroupType::kTube ||
         t == GroupType::kPlate;
}

// Comparable across types: roughly the rank ordinal of the lowest card that matters.
int strength(const CardGroup& g) { return is_sequence(g.type) ? g.key - 2 : g.key; }

struct Score {
  int bomb_like;
  int broken;
  int wilds;
  int strength;
  int neg_size;
  auto tie() const { return std::tie(bomb_like, broken, wilds, strength, neg_size); }
  bool operator<(const Score& o) const { return tie() < o.tie(); }
};

Score score(const CardGroup& g, const CardMultiset& hand, int structures) {
  return {g.is_bomb_like() ? 1 : 0, structures - count_structures(hand - g.cards), g.wilds_used, strength(g),
          -g.size()};
}

}  // namespace

int count_structures(const CardMultiset& hand) {
  int n = 0;
  for (int r = 0; r < 13; ++r) n += hand.rank_count(rank_from_ordinal(r)) >= kMinBombSize;
  const Card bj = Card::joker(Rank::kBlackJoker), rj = Card::joker(Rank::kRedJoker);
  n += hand.count(bj) == 2 && hand.count(rj) == 2;
  for (int s = 0; s < 4; ++s) {
    for (int start = 1; start <= 10; ++start) {
      bool all = true;
      for (int pos = start; pos < start + 5 && all; ++pos) {
        all = hand.count(Card(rank_at_sequence(pos), static_cast<Suit>(s))) > 0;
      }
      n += all;
    }
  }
  return n;
}

CardGroup RandomPolicy::act(const Observation&, std::span<const CardGroup> legal, std::mt19937_64& rng) const {
  if (legal.empty()) throw GuandanError("no legal actions");
  return legal[std::uniform_int_distribution<std::size_t>(0, legal.size() - 1)(rng)];
}

CardGroup HeuristicPolicy::act(const Observation& obs, std::span<const CardGroup> legal, std::mt19937_64&) const {
  if (legal.empty()) throw GuandanError("no legal actions");
  const int structures = count_structures(obs.hand);
  const CardGroup* best = nullptr;
  Score best_score{};
  auto consider = [&](const CardGroup& g) {
    Score s = score(g, obs.hand, structures);
    if (!best || s < best_score) {
      best = &g;
      best_score = s;
    }
  };

  if (!obs.to_beat) {
    for (const auto& g : legal) consider(g);
    return *best;
  }
  const CardGroup pass = CardGroup::pass();
  if (obs.to_beat_owner == partner_of(obs.viewer)) return pass;
  for (const auto& g : legal) {
    if (!g.is_pass() && g.type == obs.to_beat->type) consider(g);
  }
  if (best && !best->is_bomb_like() && best_score.broken <= 0) return *best;

  bool short_opponent = false;
  for (PlayerId p : {(obs.viewer + 1) % kNumPlayers, (obs.viewer + 3) % kNumPlayers}) {
    short_opponent |= obs.remaining[p] > 0 && obs.remaining[p] <= bomb_threshold_;
  }
  if (!short_opponent) return pass;
  best = nullptr;
  for (const auto& g : legal) {
    if (g.is_bomb_like() && (!best || beats(*best, g))) best = &g;
  }
  return best ? *best : pass;
}

GreedyPolicy::GreedyPolicy(std::shared_ptr<const QNet> net, std::string label)
    : net_(std::move(net)), label_(std::move(label)) {
  if (!net_) throw GuandanError("greedy policy needs a network");
}

CardGroup GreedyPolicy::act(const Observation& obs, std::span<const CardGroup> legal, std::mt19937_64&) const {
  if (legal.empty()) throw GuandanError("no legal actions");
  auto q = evaluate_actions(*net_, encode_state(obs), legal);
  return legal[std::max_element(q.begin(), q.end()) - q.begin()];
}

std::shared_ptr<const Policy> make_policy(const std::string& name) {
  if (name == "random") return std::make_shared<RandomPolicy>();
  if (name == "heuristic") return std::make_shared<HeuristicPolicy>();
  std::string path = name.rfind("greedy:", 0) == 0 ? name.substr(7) : name;
  if (path.empty()) throw GuandanError("empty policy name");
  auto net = std::make_shared<const QNet>(load_checkpoint(path));
  return std::make_shared<GreedyPolicy>(std::move(net), fs::path(path).filename().string());
}

void WinStats::add(const GameResult& r) {
  ++games;
  (r.a_won ? wins_a : wins_b)++;
  faults += r.fault;
  rounds += static_cast<std::uint64_t>(r.rounds);
  for (int s = 0; s < 2; ++s) {
    for (int k = 0; k < 4; ++k) promotions[s][k] += static_cast<std::uint64_t>(r.promotions[s][k]);
  }
  if (seeds.empty() || seeds.back() != r.seed) seeds.push_back(r.seed);
  results.push_back(r);
}

GameResult play_game(const Policy& a, const Policy& b, std::uint64_t seed, bool mirrored, int max_rounds) {
  GameResult res;
  res.seed = seed;
  res.mirrored = mirrored;
  const int team_a = mirrored ? 1 : 0;
  std::mt19937_64 rng(seed * 2 + (mirrored ? 1 : 0));
  Game g = Game::new_episode(seed);
  while (!g.episode_over()) {
    if (res.rounds >= max_rounds) {
      res.fault = true;
      res.fault_detail = "episode exceeded " + std::to_string(max_rounds) + " rounds";
      const auto& lv = g.episode().team_levels;
      res.a_won = lv[team_a] > lv[1 - team_a];
      return res;
    }
    while (!g.round_over()) {
      const PlayerId p = g.current_player();
      const bool is_a = team_of(p) == team_a;
      const Policy& pol = is_a ? a : b;
      auto legal = g.legal_actions();
      CardGroup action = pol.act(g.observe(p), legal, rng);
      const bool listed =
          std::any_of(legal.begin(), legal.end(), [&](const CardGroup& l) { return same_action(l, action); });
      if (!listed) {
        res.fault = true;
        res.fault_detail = pol.name() + " at seat " + std::to_string(p) + " played " + action.to_string();
        res.a_won = !is_a;
        return res;
      }
      g.step(action);
    }
    auto summary = g.finish_round();
    ++res.rounds;
    const int banker_team = team_of(summary.finish_order[0]);
    res.promotions[banker_team == team_a ? 0 : 1][std::clamp(summary.promotion, 0, 3)]++;
  }
  res.a_won = g.episode().winning_team == team_a;
  return res;
}

WinStats run_match(const Policy& a, const Policy& b, int n_games, const MatchOptions& options) {
  if (n_games < 1) throw GuandanError("a match needs at least one game");
  const int per_seed = options.mirror ? 2 : 1;
  const int total = n_games * per_seed;
  std::vector<GameResult> results(static_cast<std::size_t>(total));
  std::vector<std::string> errors(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < total; ++i) {
    const std::uint64_t seed = options.base_seed + static_cast<std::uint64_t>(i / per_seed);
    try {
      results[i] = play_game(a, b, seed, i % per_seed == 1, options.max_rounds);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw GuandanError("match aborted: " + e);
  }
  WinStats stats;
  for (const auto& r : results) stats.add(r);
  return stats;
}

std::vector<CheckpointRow> evaluate_checkpoints(const std::string& dir, const Policy& opponent, int n_games,
                                                const MatchOptions& options) {
  if (!fs::is_directory(dir)) throw GuandanError("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".gdqn") files.push_back(e.path());
  }
  if (files.empty()) throw GuandanError("no checkpoints in " + dir);
  std::sort(files.begin(), files.end());

  std::map<std::string, std::pair<std::int64_t, double>> index;
  std::ifstream in(fs::path(dir) / "index.csv");
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string name, step, version, elapsed;
    if (std::getline(ss, name, ',') && std::getline(ss, step, ',') && std::getline(ss, version, ',') &&
        std::getline(ss, elapsed, ',')) {
      try {
        index[name] = {std::stoll(step), std::stod(elapsed)};
      } catch (const std::exception&) {
      }
    }
  }

  std::vector<CheckpointRow> rows;
  for (const auto& f : files) {
    CheckpointRow row;
    row.checkpoint = f.filename().string();
    if (auto it = index.find(row.checkpoint); it != index.end()) std::tie(row.step, row.elapsed_s) = it->second;
    try {
      GreedyPolicy a(std::make_shared<const QNet>(load_checkpoint(f.string())), row.checkpoint);
      row.stats = run_match(a, opponent, n_games, options);
    } catch (const GuandanError& e) {
      row.readable = false;
      row.warning = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string checkpoint_csv(const std::vector<CheckpointRow>& rows) {
  std::ostringstream out;
  out << "checkpoint,games,wins_a,winrate_a,faults,step,elapsed_s\n";
  for (const auto& r : rows) {
    out << r.checkpoint << "," << r.stats.games << "," << r.stats.wins_a << ",";
    if (r.readable) {
      out << r.stats.winrate_a();
    } else {
      out << "nan";
    }
    out << "," << r.stats.faults << "," << r.step << "," << r.elapsed_s << "\n";
  }
  return out.str();
}

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw GuandanError("spearman needs two equal series of length >= 2");
  auto ranks = [](std::span<const double> v) {
    std::vector<std::size_t> idx(v.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();) {
      std::size_t j = i;
      while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
      const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2 + 1;
      for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1) / 2;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mean) * (ry[i] - mean);
    sxx += (rx[i] - mean) * (rx[i] - mean);
    syy += (ry[i] - mean) * (ry[i] - mean);
  }
  if (sxx == 0 || syy == 0) return std::nan("");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace guandan
