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

// guandan: train, eval, simulate, serve.
//
// Exit codes: 0 ok, 1 configuration error, 2 runtime fault.

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "guandan/binio.h"
#include "guandan/config.h"
#include "guandan/distributed.h"
#include "guandan/evalharness.h"
#include "guandan/gamelog.h"
#include "guandan/playservice.h"

namespace {

using namespace guandan;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::string self_executable(const char* argv0) {
  std::error_code ec;
  auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
  return ec ? std::string(argv0) : p.string();
}

struct TrainFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> actors;
  std::optional<std::int64_t> steps;
  std::optional<double> max_minutes;
  std::optional<std::int64_t> max_transitions;
  std::optional<double> epsilon;
  std::optional<double> lambda;
  std::optional<int> batch;
  std::optional<double> lr;
  std::optional<std::string> optimizer;
  std::optional<int> checkpoint_every;
  std::optional<std::vector<int>> hidden;
};

TrainConfig build_config(const TrainFlags& f) {
  TrainConfig c = f.config_path.empty() ? TrainConfig{} : load_train_config(f.config_path);
  if (f.seed) c.seed = *f.seed;
  if (f.out) c.out_dir = *f.out;
  if (f.actors) c.actors = *f.actors;
  if (f.steps) c.steps = *f.steps;
  if (f.max_minutes) c.max_minutes = *f.max_minutes;
  if (f.max_transitions) c.max_transitions = *f.max_transitions;
  if (f.epsilon) c.epsilon = *f.epsilon;
  if (f.lambda) c.lambda = *f.lambda;
  if (f.batch) c.batch = *f.batch;
  if (f.lr) c.lr = *f.lr;
  if (f.optimizer) c.optimizer = *f.optimizer;
  if (f.checkpoint_every) c.checkpoint_every = *f.checkpoint_every;
  if (f.hidden) c.hidden = *f.hidden;
  c.validate();
  return c;
}

int cmd_train(const TrainFlags& flags, const std::string& exe) {
  TrainConfig config;
  try {
    config = build_config(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  auto s = run_learner(config, exe);
  std::printf("steps %lld  version %llu  transitions %llu  episodes %llu  checkpoints %zu  %.1fs%s\n",
              static_cast<long long>(s.steps), static_cast<unsigned long long>(s.final_version),
              static_cast<unsigned long long>(s.transitions), static_cast<unsigned long long>(s.episodes),
              s.checkpoints.size(), s.elapsed_s, s.interrupted ? "  (interrupted)" : "");
  if (!s.fault.empty()) {
    std::cerr << "fault: " << s.fault << "\n";
    return kExitRuntime;
  }
  if (!s.integrity_ok()) {
    std::cerr << "integrity check failed; see " << config.out_dir << "/summary.json\n";
    return kExitRuntime;
  }
  return kExitOk;
}

struct EvalFlags {
  std::string a = "heuristic";
  std::string b = "random";
  std::string checkpoints;
  int games = 100;
  std::uint64_t seed = 1;
  bool mirror = true;
  std::string out;
};

int cmd_eval(const EvalFlags& f) {
  std::shared_ptr<const Policy> b;
  std::shared_ptr<const Policy> a;
  try {
    b = make_policy(f.b);
    if (f.checkpoints.empty()) a = make_policy(f.a);
  } catch (const GuandanError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  MatchOptions opt;
  opt.base_seed = f.seed;
  opt.mirror = f.mirror;
  std::vector<CheckpointRow> rows;
  if (!f.checkpoints.empty()) {
    rows = evaluate_checkpoints(f.checkpoints, *b, f.games, opt);
    for (const auto& r : rows) {
      if (!r.readable) std::cerr << "warning: skipped " << r.checkpoint << ": " << r.warning << "\n";
    }
  } else {
    CheckpointRow row;
    row.checkpoint = a->name();
    row.stats = run_match(*a, *b, f.games, opt);
    rows.push_back(std::move(row));
  }
  const std::string csv = checkpoint_csv(rows);
  if (f.out.empty()) {
    std::cout << csv;
  } else {
    write_file(f.out, csv);
  }
  for (const auto& r : rows) {
    if (!r.readable) continue;
    std::fprintf(stderr, "%s vs %s: %llu/%llu wins (%.3f), faults %llu\n", r.checkpoint.c_str(), b->name().c_str(),
                 static_cast<unsigned long long>(r.stats.wins_a), static_cast<unsigned long long>(r.stats.games),
                 r.stats.winrate_a(), static_cast<unsigned long long>(r.stats.faults));
  }
  return kExitOk;
}

struct SimulateFlags {
  int games = 1;
  std::string policy = "random";
  std::string policy_b;
  std::uint64_t seed = 1;
  std::string out;
  int max_rounds = 500;
};

int cmd_simulate(const SimulateFlags& f) {
  std::shared_ptr<const Policy> p0, p1;
  try {
    p0 = make_policy(f.policy);
    p1 = f.policy_b.empty() ? p0 : make_policy(f.policy_b);
  } catch (const GuandanError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  SimulateOptions opt;
  opt.base_seed = f.seed;
  opt.max_rounds = f.max_rounds;
  const std::string log = simulate(*p0, *p1, f.games, opt);
  if (f.out.empty()) {
    std::cout << log;
  } else {
    write_file(f.out, log);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GuanDan self-play training, evaluation and play server"};
  app.require_subcommand(1);

  TrainFlags tf;
  auto* train = app.add_subcommand("train", "Run the learner and its actor processes");
  train->add_option("--config", tf.config_path, "INI run manifest");
  train->add_option("--seed", tf.seed);
  train->add_option("--out", tf.out, "Run directory");
  train->add_option("--actors", tf.actors);
  train->add_option("--steps", tf.steps, "Learner steps (0 = unlimited)");
  train->add_option("--max-minutes", tf.max_minutes);
  train->add_option("--max-transitions", tf.max_transitions);
  train->add_option("--epsilon", tf.epsilon);
  train->add_option("--lambda", tf.lambda);
  train->add_option("--batch", tf.batch);
  train->add_option("--lr", tf.lr);
  train->add_option("--optimizer", tf.optimizer);
  train->add_option("--checkpoint-every", tf.checkpoint_every);
  train->add_option("--hidden", tf.hidden, "Hidden widths, e.g. --hidden 512,512")->delimiter(',');

  ActorProcessOptions ao;
  auto* actor = app.add_subcommand("actor", "Actor process (started by train)");
  actor->group("");
  actor->add_option("--socket", ao.socket_path)->required();
  actor->add_option("--id", ao.id)->required();
  actor->add_option("--seed", ao.seed)->required();
  actor->add_option("--epsilon", ao.epsilon);
  actor->add_option("--sync-period", ao.sync_period);
  actor->add_option("--max-rounds", ao.max_rounds);
  actor->add_option("--max-episodes", ao.max_episodes);

  EvalFlags ef;
  auto* eval = app.add_subcommand("eval", "Team-vs-team match or checkpoint series");
  eval->add_option("--a", ef.a, "Policy A: random, heuristic or a checkpoint path");
  eval->add_option("--b", ef.b, "Policy B");
  eval->add_option("--checkpoints", ef.checkpoints, "Evaluate every checkpoint in this directory as A");
  eval->add_option("--games", ef.games, "Deals (doubled when mirrored)")->check(CLI::PositiveNumber);
  eval->add_option("--seed", ef.seed);
  eval->add_flag("--mirror,!--no-mirror", ef.mirror, "Replay every deal with seats swapped (default on)");
  eval->add_option("--out", ef.out, "CSV output (default stdout)");

  SimulateFlags sf;
  auto* sim = app.add_subcommand("simulate", "Self-play without learning; writes JSONL game logs");
  sim->add_option("--games", sf.games)->check(CLI::PositiveNumber);
  sim->add_option("--policy", sf.policy, "random, heuristic or a checkpoint path");
  sim->add_option("--policy-b", sf.policy_b, "Policy for seats 1 and 3 (default: same as --policy)");
  sim->add_option("--seed", sf.seed);
  sim->add_option("--out", sf.out, "Log file (default stdout)");
  sim->add_option("--max-rounds", sf.max_rounds)->check(CLI::PositiveNumber);

  ServeOptions so;
  auto* serve = app.add_subcommand("serve", "Play server for humans and bots");
  serve->add_option("--checkpoint", so.checkpoint, "Bot network; heuristic bots when omitted");
  serve->add_option("--port", so.port);
  serve->add_option("--host", so.host);
  serve->add_option("--static-dir", so.static_dir, "Serve a browser client from this directory");
  serve->add_option("--bot-timeout", so.bot_timeout_s, "Seconds before a bot move is replaced (0 = off)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) return cmd_train(tf, self_executable(argv[0]));
    if (*actor) return run_actor_process(ao);
    if (*eval) return cmd_eval(ef);
    if (*sim) return cmd_simulate(sf);
    if (*serve) return run_server(so);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
