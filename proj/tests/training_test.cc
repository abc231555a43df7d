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

#include "guandan/training.h"

#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "guandan/config.h"
#include "guandan/wire.h"

namespace guandan {
namespace {

// Written from the definition, case by case, without std::clamp.
double oracle_target(double qa, double ql, double lambda) {
  if (std::abs(qa) < 1e-6) {
    const double band = lambda * std::max(1.0, std::abs(ql));
    if (ql > qa + band) return qa + band;
    if (ql < qa - band) return qa - band;
    return ql;
  }
  const double r = ql / qa;
  if (r > 1 + lambda) return (1 + lambda) * qa;
  if (r < 1 - lambda) return (1 - lambda) * qa;
  return ql;
}

Transition random_transition(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(-1, 3);
  Transition t;
  for (auto& v : t.state) v = static_cast<std::int8_t>(small(rng));
  for (auto& v : t.action) v = static_cast<std::int8_t>(small(rng) > 1);
  t.q_actor = std::uniform_real_distribution<float>(-3, 3)(rng);
  t.reward = static_cast<float>(std::uniform_int_distribution<int>(-3, 3)(rng));
  t.param_version = rng() % 1000;
  t.player = static_cast<std::uint8_t>(rng() % 4);
  t.round = static_cast<std::uint16_t>(1 + rng() % 20);
  return t;
}

QNet small_net(std::uint64_t seed) {
  QNet net({kInputDim, 16, 16, 1});
  net.init_he_uniform(seed);
  return net;
}

TEST_CASE("epsilon greedy: greedy picks the first maximum") {
  std::mt19937_64 rng(3);
  std::vector<float> q{0.1f, 0.7f, -2.0f, 0.7f};
  for (int i = 0; i < 100; ++i) CHECK(epsilon_greedy_select(q, 0.0, rng) == 1);
  CHECK_THROWS_AS(epsilon_greedy_select(std::vector<float>{}, 0.1, rng), GuandanError);
}

TEST_CASE("epsilon greedy: exploration is uniform") {
  std::mt19937_64 rng(11);
  const int k = 10, draws = 100000;
  std::vector<float> q(k, 0.0f);
  q[4] = 1.0f;
  std::vector<int> count(k, 0);
  for (int i = 0; i < draws; ++i) count[epsilon_greedy_select(q, 1.0, rng)]++;
  double chi2 = 0;
  const double expected = static_cast<double>(draws) / k;
  for (int c : count) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 27.88);  // chi-square, 9 dof, p = 0.001

  // epsilon = 0.3 over 10 actions: the greedy arm gets 0.7 + 0.03.
  int greedy = 0;
  for (int i = 0; i < draws; ++i) greedy += epsilon_greedy_select(q, 0.3, rng) == 4;
  CHECK(static_cast<double>(greedy) / draws == doctest::Approx(0.73).epsilon(0.01));
}

TEST_CASE("clipped target: worked examples") {
  CHECK(preprocess_target(2, 4, 0.2).value == doctest::Approx(2.4).epsilon(1e-12));
  CHECK_FALSE(preprocess_target(2, 4, 0.2).in_band);
  CHECK(preprocess_target(2, 1.9, 0.2).value == doctest::Approx(1.9).epsilon(1e-12));
  CHECK(preprocess_target(2, 1.9, 0.2).in_band);
  CHECK(preprocess_target(2, 1.0, 0.2).value == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(preprocess_target(-1, -2, 0.5).value == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(preprocess_target(-1, 1, 0.5).value == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(preprocess_target(0, 5, 0.2).value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(preprocess_target(0, 0.1, 0.2).value == doctest::Approx(0.1).epsilon(1e-12));
  CHECK_THROWS_AS(preprocess_target(1, 1, 0), GuandanError);
  CHECK_THROWS_AS(preprocess_target(1, 1, -0.1), GuandanError);
}

TEST_CASE("clipped target: matches the oracle and stays in the band") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> q(-3, 3), lam(0.01, 1.0);
  for (int i = 0; i < 20000; ++i) {
    double qa = q(rng), ql = q(rng), l = lam(rng);
    if (i % 50 == 0) qa = 0;
    const auto t = preprocess_target(qa, ql, l);
    CHECK(t.value == doctest::Approx(oracle_target(qa, ql, l)).epsilon(1e-12));
    if (qa != 0) {
      const double ratio = t.value / qa;
      CHECK(ratio >= 1 - l - 1e-12);
      CHECK(ratio <= 1 + l + 1e-12);
    }
    CHECK(t.in_band == (t.value == ql));
  }
}

TEST_CASE("clipped target: infinite lambda is plain regression") {
  QNet a = small_net(7), b = small_net(7);
  Sgd oa(0.01f), ob(0.01f);
  std::mt19937_64 rng(9);
  std::vector<Transition> batch;
  for (int i = 0; i < 32; ++i) batch.push_back(random_transition(rng));
  learner_update(batch, a, oa, kNoClip);

  std::vector<float> x(batch.size() * kInputDim), r(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    batch[i].input(x.data() + i * kInputDim);
    r[i] = batch[i].reward;
  }
  std::vector<float> grad(b.num_params());
  b.mse_gradient(x.data(), r.data(), static_cast<int>(batch.size()), grad.data());
  ob.step(b.params(), grad);
  for (std::size_t i = 0; i < a.num_params(); ++i) CHECK(a.params()[i] == doctest::Approx(b.params()[i]).epsilon(1e-5));
}

TEST_CASE("learner update: single transition by hand") {
  QNet net({kInputDim, 1});
  float* w = net.weight(0);
  Transition t;
  t.state[0] = 1;
  t.state[10] = 2;
  t.action[3] = 1;
  w[0] = 0.5f;
  w[10] = 0.25f;
  w[kStateDim + 3] = 1.0f;
  net.bias(0)[0] = 0.0f;  // q = 0.5 + 0.5 + 1 = 2
  t.reward = 1;
  t.q_actor = 1.9f;  // 2 / 1.9 is inside [0.8, 1.2]
  Sgd sgd(0.1f);
  auto s = learner_update(std::span<const Transition>(&t, 1), net, sgd, 0.2);
  CHECK(s.loss == doctest::Approx(1.0));
  CHECK(s.clipped_fraction == 0);
  CHECK(net.version() == 1);
  // w -= lr * 2 (q - r) x
  CHECK(w[0] == doctest::Approx(0.5 - 0.2 * 1));
  CHECK(w[10] == doctest::Approx(0.25 - 0.2 * 2));
  CHECK(w[kStateDim + 3] == doctest::Approx(1.0 - 0.2));
  CHECK(net.bias(0)[0] == doctest::Approx(-0.2));

  // Outside the band: the loss uses the clipped value and nothing moves.
  QNet before = net;
  t.q_actor = 0.5f;  // q = 1.2 after the step above; ratio 2.4 -> clip at 0.6
  auto c = learner_update(std::span<const Transition>(&t, 1), net, sgd, 0.2);
  CHECK(c.clipped_fraction == 1);
  CHECK(c.loss == doctest::Approx((0.6 - 1) * (0.6 - 1)));
  for (std::size_t i = 0; i < net.num_params(); ++i) CHECK(net.params()[i] == before.params()[i]);
  CHECK(net.version() == 2);
}

TEST_CASE("learner update: perfect predictions give zero loss") {
  QNet net = small_net(13);
  std::mt19937_64 rng(4);
  std::vector<Transition> batch;
  for (int i = 0; i < 8; ++i) {
    auto t = random_transition(rng);
    std::vector<float> x(kInputDim);
    t.input(x.data());
    t.reward = net.forward_one(x);
    t.q_actor = t.reward;
    batch.push_back(t);
  }
  QNet before = net;
  Sgd sgd(0.5f);
  auto s = learner_update(batch, net, sgd, 0.2);
  CHECK(s.loss == doctest::Approx(0).epsilon(1e-10));
  for (std::size_t i = 0; i < net.num_params(); ++i) CHECK(net.params()[i] == doctest::Approx(before.params()[i]));
}

TEST_CASE("replay buffer evicts oldest first") {
  ReplayBuffer buf(5);
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(buf.sample(1, rng), GuandanError);
  CHECK_THROWS_AS(ReplayBuffer(0), GuandanError);
  for (int i = 0; i < 12; ++i) {
    Transition t;
    t.reward = static_cast<float>(i % 7 - 3);
    t.param_version = static_cast<std::uint64_t>(i);
    buf.push(t);
  }
  CHECK(buf.size() == 5);
  CHECK(buf.total_pushed() == 12);
  CHECK(buf.sequence_numbers() == std::vector<std::uint64_t>{7, 8, 9, 10, 11});
  for (const auto& t : buf.sample(200, rng)) CHECK(t.param_version >= 7);
}

TEST_CASE("replay buffer samples uniformly") {
  ReplayBuffer buf(4);
  for (int i = 0; i < 4; ++i) {
    Transition t;
    t.param_version = static_cast<std::uint64_t>(i);
    buf.push(t);
  }
  std::mt19937_64 rng(2);
  std::array<int, 4> count{};
  for (const auto& t : buf.sample(40000, rng)) count[t.param_version]++;
  double chi2 = 0;
  for (int c : count) chi2 += (c - 10000.0) * (c - 10000.0) / 10000.0;
  CHECK(chi2 < 16.27);  // 3 dof, p = 0.001
}

TEST_CASE("learner step needs a full batch") {
  ReplayBuffer buf(100);
  QNet net = small_net(1);
  Sgd sgd(0.01f);
  std::mt19937_64 rng(1);
  buf.push(random_transition(rng));
  CHECK_THROWS_AS(learner_step(buf, net, sgd, 4, 0.2, rng), GuandanError);
  for (int i = 0; i < 3; ++i) buf.push(random_transition(rng));
  CHECK(learner_step(buf, net, sgd, 4, 0.2, rng).loss >= 0);
  CHECK(net.version() == 1);
}

TEST_CASE("transition rejects non-integer features") {
  StateVector s{};
  s[5] = 0.5f;
  CHECK_THROWS_AS(Transition::make(s, CardGroup::pass(), 0, 0, 0, 1), GuandanError);
  s[5] = 200;
  CHECK_THROWS_AS(Transition::make(s, CardGroup::pass(), 0, 0, 0, 1), GuandanError);
}

TEST_CASE("actor episode replays through a fresh engine") {
  QNet net = small_net(21);
  net.set_version(17);
  ActorOptions opt;
  opt.epsilon = 0.2;
  for (std::uint64_t seed : {1ull, 2ull, 99ull}) {
    std::mt19937_64 rng(seed * 31);
    auto rec = run_actor_episode(seed, net, opt, rng);
    REQUIRE(rec.completed);
    REQUIRE_FALSE(rec.rounds.empty());

    Game g = Game::new_episode(seed);
    std::array<std::size_t, kNumPlayers> cursor{};
    std::size_t moves = 0;
    for (std::size_t r = 0; r < rec.rounds.size(); ++r) {
      const auto& round = rec.rounds[r];
      CHECK(g.round().round_level == round.round_level);
      for (const auto& m : round.moves) {
        REQUIRE(g.current_player() == m.player);
        const auto& t = rec.trajectories[m.player].at(cursor[m.player]++);
        auto state = encode_state(g.observe(m.player));
        for (int i = 0; i < kStateDim; ++i) REQUIRE(t.state[i] == state[i]);
        auto a = encode_action(m.action);
        for (int i = 0; i < kActionDim; ++i) REQUIRE(t.action[i] == a[i]);
        CHECK(t.param_version == 17);
        CHECK(t.round == r + 1);
        CHECK(t.reward == static_cast<float>(round.rewards[m.player]));
        g.step(m.action);
        ++moves;
      }
      REQUIRE(g.round_over());
      CHECK(g.round().finish_order == round.finish_order);
      CHECK(g.round_rewards() == round.rewards);
      double sum = 0;
      for (double v : round.rewards) sum += v;
      CHECK(sum == 0);
      g.finish_round();
    }
    CHECK(g.episode_over());
    CHECK(moves == rec.num_transitions());
    for (PlayerId p = 0; p < kNumPlayers; ++p) CHECK(cursor[p] == rec.trajectories[p].size());
  }
}

TEST_CASE("actor episode stops at the round cap") {
  QNet net = small_net(3);
  ActorOptions opt;
  opt.max_rounds = 1;
  std::mt19937_64 rng(8);
  auto rec = run_actor_episode(5, net, opt, rng);
  if (!rec.completed) {
    CHECK(rec.rounds.size() == 1);
    for (const auto& traj : rec.trajectories) {
      for (const auto& t : traj) CHECK(t.round == 1);
    }
  }
}

TEST_CASE("trajectory codec round-trips and detects corruption") {
  std::mt19937_64 rng(12);
  TrajectoryBatch b;
  b.actor_id = 3;
  b.sequence = 41;
  b.episode_seed = 0xdeadbeefcafeull;
  for (int i = 0; i < 7; ++i) b.transitions.push_back(random_transition(rng));
  const std::string bytes = encode_trajectory(b);
  CHECK(bytes.size() == 4 + 8 + 8 + 4 + 7 * kPackedTransitionBytes + 4);
  auto d = decode_trajectory(bytes);
  CHECK(d.actor_id == 3);
  CHECK(d.sequence == 41);
  CHECK(d.episode_seed == b.episode_seed);
  REQUIRE(d.transitions.size() == 7);
  for (int i = 0; i < 7; ++i) {
    CHECK(d.transitions[i].state == b.transitions[i].state);
    CHECK(d.transitions[i].action == b.transitions[i].action);
    CHECK(d.transitions[i].q_actor == b.transitions[i].q_actor);
    CHECK(d.transitions[i].reward == b.transitions[i].reward);
    CHECK(d.transitions[i].param_version == b.transitions[i].param_version);
    CHECK(d.transitions[i].player == b.transitions[i].player);
    CHECK(d.transitions[i].round == b.transitions[i].round);
  }
  for (std::size_t pos : {std::size_t{0}, std::size_t{30}, bytes.size() - 1}) {
    std::string bad = bytes;
    bad[pos] ^= 0x10;
    CHECK_THROWS_AS(decode_trajectory(bad), FormatError);
  }
  CHECK_THROWS_AS(decode_trajectory(bytes.substr(0, 100)), FormatError);
  CHECK_THROWS_AS(decode_trajectory(""), FormatError);
}

TEST_CASE("frames over a socket pair") {
  int sv[2];
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, sv) == 0);
  write_frame(sv[0], FrameKind::kHello, encode_hello({2, 9}));
  ParamsMessage m{true, 5, "abc"};
  write_frame(sv[0], FrameKind::kParams, encode_params(m));
  auto f1 = read_frame(sv[1]);
  REQUIRE(f1);
  CHECK(f1->kind == FrameKind::kHello);
  auto h = decode_hello(f1->payload);
  CHECK(h.actor_id == 2);
  CHECK(h.have_version == 9);
  auto f2 = read_frame(sv[1]);
  REQUIRE(f2);
  auto p = decode_params(f2->payload);
  CHECK(p.stop);
  CHECK(p.version == 5);
  CHECK(p.checkpoint == "abc");

  // Unknown kind.
  std::string raw = encode_frame(FrameKind::kStats, "{}");
  raw[4] = 9;
  REQUIRE(::send(sv[0], raw.data(), raw.size(), 0) == static_cast<ssize_t>(raw.size()));
  CHECK_THROWS_AS(read_frame(sv[1]), FormatError);
  ::close(sv[0]);
  ::close(sv[1]);

  // Clean EOF, then EOF inside a frame.
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, sv) == 0);
  raw = encode_frame(FrameKind::kStats, "{\"a\":1}");
  REQUIRE(::send(sv[0], raw.data(), raw.size() - 2, 0) > 0);
  ::close(sv[0]);
  CHECK_THROWS_AS(read_frame(sv[1]), FormatError);
  ::close(sv[1]);
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, sv) == 0);
  ::close(sv[0]);
  CHECK_FALSE(read_frame(sv[1]).has_value());
  ::close(sv[1]);
}

TEST_CASE("config round-trips through its text form") {
  TrainConfig c;
  c.seed = 77;
  c.out_dir = "runs/a";
  c.actors = 2;
  c.lambda = 0.35;
  c.lr = 3e-4;
  c.optimizer = "sgd";
  c.hidden = {64, 32};
  c.max_replay_ratio = 4.5;
  const std::string text = format_train_config(c);
  CHECK(parse_train_config(text) == c);
  CHECK(text.find("[learner]") != std::string::npos);
  CHECK(parse_train_config(format_train_config(TrainConfig{})) == TrainConfig{});
  CHECK(c.widths() == std::vector<int>{kInputDim, 64, 32, 1});
}

TEST_CASE("config rejects bad input") {
  CHECK_THROWS_AS(parse_train_config("[learner]\nlamda = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("[trainer]\nseed = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("[learner]\nbatch = 12x\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("[net]\nhidden = 64,,32\n"), ConfigError);
  CHECK_THROWS_AS(parse_train_config("[run\nseed=1\n"), ConfigError);
  CHECK_THROWS_AS(load_train_config("/nonexistent/train.ini"), ConfigError);

  auto bad = [](auto mutate) {
    TrainConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), ConfigError);
  };
  bad([](TrainConfig& c) { c.lambda = 0; });
  bad([](TrainConfig& c) { c.lambda = -1; });
  bad([](TrainConfig& c) { c.epsilon = 1.5; });
  bad([](TrainConfig& c) { c.actors = 0; });
  bad([](TrainConfig& c) { c.optimizer = "rmsprop"; });
  bad([](TrainConfig& c) { c.capacity = 10; });
  bad([](TrainConfig& c) { c.hidden.clear(); });
  TrainConfig{}.validate();
}

}  // namespace
}  // namespace guandan
