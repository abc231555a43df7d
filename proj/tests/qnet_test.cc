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

#include "guandan/qnet.h"

#include <cmath>
#include <random>

#include "doctest.h"
#include "guandan/kernels.h"
#include "gradcheck.h"

namespace guandan {
namespace {

template <typename T>
std::vector<T> random_rows(std::mt19937_64& rng, int n, int dim) {
  std::normal_distribution<double> d(0, 1);
  std::vector<T> x(static_cast<std::size_t>(n) * dim);
  for (auto& v : x) v = static_cast<T>(d(rng));
  return x;
}

TEST_CASE("zero network outputs zero") {
  QNet net(QNet::default_widths());
  std::mt19937_64 rng(1);
  auto x = random_rows<float>(rng, 3, kInputDim);
  std::vector<float> q(3, 1.0f);
  net.forward(x.data(), 3, q.data());
  for (float v : q) CHECK(v == 0.0f);
  CHECK(net.num_params() == 567u * 512 + 512 + 4 * (512u * 512 + 512) + 512 + 1);
}

TEST_CASE("single linear layer is w.x + b") {
  Mlp<double> net({3, 1});
  double* w = net.weight(0);
  w[0] = 0.5;
  w[1] = -2;
  w[2] = 3;
  net.bias(0)[0] = 0.25;
  std::vector<double> x{1, 2, 3};
  CHECK(net.forward_one(x) == doctest::Approx(0.5 - 4 + 9 + 0.25).epsilon(1e-15));
  CHECK_THROWS_AS(net.forward_one(std::vector<double>{1, 2}), GuandanError);

  // d/dw of (w.x + b - t)^2 = 2(w.x + b - t) x.
  std::vector<double> grad(net.num_params());
  const double t = 1.0;
  double loss = net.mse_gradient(x.data(), &t, 1, grad.data());
  const double e = 5.75 - t;
  CHECK(loss == doctest::Approx(e * e));
  for (int i = 0; i < 3; ++i) CHECK(grad[i] == doctest::Approx(2 * e * x[i]));
  CHECK(grad[3] == doctest::Approx(2 * e));
}

TEST_CASE("batched forward equals per-row forward and the serial reference") {
  std::mt19937_64 rng(2);
  QNet net({kInputDim, 64, 32, 1});
  net.init_he_uniform(9);
  const int n = 300;
  auto x = random_rows<float>(rng, n, kInputDim);
  std::vector<float> batched(n), serial(n);
  net.forward(x.data(), n, batched.data());
  net.forward(x.data(), n, serial.data(), Backend::kSerial);
  auto ref = net.cast<double>();
  std::vector<double> exact(n);
  std::vector<double> xd(x.begin(), x.end());
  ref.forward(xd.data(), n, exact.data(), Backend::kSerial);
  for (int i = 0; i < n; ++i) {
    float one = net.forward_one(std::span<const float>(x.data() + i * kInputDim, kInputDim));
    CHECK(one == doctest::Approx(batched[i]).epsilon(1e-5));
    CHECK(batched[i] == doctest::Approx(exact[i]).epsilon(1e-4).scale(1.0));
    CHECK(serial[i] == doctest::Approx(exact[i]).epsilon(1e-4).scale(1.0));
  }
  std::vector<float> again(n);
  net.forward(x.data(), n, again.data());
  CHECK(again == batched);
}

TEST_CASE("q_values with the split first layer matches full forward") {
  std::mt19937_64 rng(3);
  QNet net({kInputDim, 128, 64, 1});
  net.init_he_uniform(4);
  auto state = random_rows<float>(rng, 1, kStateDim);
  const int n = 150;
  auto actions = random_rows<float>(rng, n, kActionDim);
  std::vector<float> x(static_cast<std::size_t>(n) * kInputDim);
  for (int i = 0; i < n; ++i) {
    std::copy(state.begin(), state.end(), x.begin() + i * kInputDim);
    std::copy(actions.begin() + i * kActionDim, actions.begin() + (i + 1) * kActionDim,
              x.begin() + i * kInputDim + kStateDim);
  }
  std::vector<float> full(n), split(n);
  net.forward(x.data(), n, full.data());
  net.q_values(state.data(), actions.data(), n, split.data());
  for (int i = 0; i < n; ++i) CHECK(split[i] == doctest::Approx(full[i]).epsilon(1e-4).scale(1.0));
}

TEST_CASE("parallel and serial kernels agree, forward and backward") {
  std::mt19937_64 rng(5);
  for (auto [n, in, out] : {std::tuple{1, 7, 3}, std::tuple{200, 70, 150}, std::tuple{129, 567, 64}}) {
    auto x = random_rows<double>(rng, n, in);
    auto w = random_rows<double>(rng, out, in);
    auto b = random_rows<double>(rng, 1, out);
    auto dy = random_rows<double>(rng, n, out);
    std::vector<double> y1(n * out), y2(n * out);
    kernels::dense_forward(x.data(), n, in, w.data(), b.data(), out, true, y1.data(), Backend::kParallel);
    kernels::dense_forward(x.data(), n, in, w.data(), b.data(), out, true, y2.data(), Backend::kSerial);
    for (std::size_t i = 0; i < y1.size(); ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-12));
    std::vector<double> dw1(out * in), db1(out), dx1(n * in), dw2(out * in), db2(out), dx2(n * in);
    kernels::dense_backward(x.data(), n, in, w.data(), out, dy.data(), dw1.data(), db1.data(), dx1.data(),
                            Backend::kParallel);
    kernels::dense_backward(x.data(), n, in, w.data(), out, dy.data(), dw2.data(), db2.data(), dx2.data(),
                            Backend::kSerial);
    for (std::size_t i = 0; i < dw1.size(); ++i) CHECK(dw1[i] == doctest::Approx(dw2[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < db1.size(); ++i) CHECK(db1[i] == doctest::Approx(db2[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < dx1.size(); ++i) CHECK(dx1[i] == doctest::Approx(dx2[i]).epsilon(1e-12));
  }
}

TEST_CASE("perfect fit has zero gradient") {
  std::mt19937_64 rng(6);
  Mlp<double> net({10, 8, 1});
  net.init_he_uniform(1);
  auto x = random_rows<double>(rng, 5, 10);
  std::vector<double> q(5), grad(net.num_params());
  net.forward(x.data(), 5, q.data());
  CHECK(net.mse_gradient(x.data(), q.data(), 5, grad.data()) == 0.0);
  for (double g : grad) CHECK(g == 0.0);
}

TEST_CASE("analytic gradient matches central differences on five random nets") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    double err = testing::gradient_check_max_rel_error(seed);
    INFO("seed " << seed << " max relative error " << err);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("gradient descent decreases the loss on a fixed batch") {
  std::mt19937_64 rng(8);
  Mlp<float> net({20, 32, 32, 1});
  net.init_he_uniform(2);
  auto x = random_rows<float>(rng, 16, 20);
  auto t = random_rows<float>(rng, 1, 16);
  std::vector<float> grad(net.num_params());
  Sgd sgd(1e-3f);
  float prev = net.mse_gradient(x.data(), t.data(), 16, grad.data());
  for (int step = 0; step < 150; ++step) {
    sgd.step(net.params(), grad);
    float loss = net.mse_gradient(x.data(), t.data(), 16, grad.data());
    CHECK(loss < prev);
    prev = loss;
  }
}

TEST_CASE("adam fits a tiny regression") {
  std::mt19937_64 rng(9);
  Mlp<float> net({4, 16, 1});
  net.init_he_uniform(3);
  auto x = random_rows<float>(rng, 32, 4);
  std::vector<float> t(32);
  for (int i = 0; i < 32; ++i) t[i] = x[i * 4] - 0.5f * x[i * 4 + 2];
  std::vector<float> grad(net.num_params());
  auto opt = make_optimizer("adam", 1e-2f);
  float first = net.mse_gradient(x.data(), t.data(), 32, grad.data());
  float loss = first;
  for (int step = 0; step < 500; ++step) {
    opt->step(net.params(), grad);
    loss = net.mse_gradient(x.data(), t.data(), 32, grad.data());
  }
  CHECK(loss < 0.05f * first);
  CHECK_THROWS_AS(make_optimizer("rmsprop", 1e-3f), GuandanError);
}

TEST_CASE("checkpoint round-trip and corruption") {
  QNet net({kInputDim, 16, 8, 1});
  net.init_he_uniform(11);
  net.set_version(7);
  auto bytes = serialize(net);
  QNet back = deserialize(bytes);
  CHECK(back.version() == 7);
  CHECK(back.widths() == net.widths());
  CHECK(std::equal(back.params().begin(), back.params().end(), net.params().begin()));

  CHECK_THROWS_AS(deserialize(bytes.substr(0, bytes.size() - 3)), FormatError);
  CHECK_THROWS_AS(deserialize(bytes.substr(0, 10)), FormatError);
  CHECK_THROWS_AS(deserialize(""), FormatError);
  std::string flipped = bytes;
  flipped[100] ^= 0x10;
  try {
    deserialize(flipped);
    FAIL("corruption not detected");
  } catch (const FormatError& e) {
    CHECK(e.offset() == bytes.size() - 4);
  }
  std::string bad_magic = bytes;
  bad_magic[1] = 'x';
  CHECK_THROWS_AS(deserialize(bad_magic), FormatError);
  std::string huge = bytes;
  huge[12] = static_cast<char>(0xff);  // first width
  huge[13] = static_cast<char>(0xff);
  CHECK_THROWS_AS(deserialize(huge), FormatError);
}

}  // namespace
}  // namespace guandan
