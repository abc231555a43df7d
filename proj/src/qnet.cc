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

#include <zlib.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "guandan/binio.h"
#include "guandan/kernels.h"

namespace guandan {
namespace {

constexpr std::uint32_t kCheckpointMagic = 0x4e514447;  // "GDQN"
constexpr std::uint32_t kCheckpointFormat = 1;
constexpr std::uint32_t kMaxLayers = 64;
constexpr std::uint32_t kMaxWidth = 1 << 16;

}  // namespace

template <typename T>
Mlp<T>::Mlp(std::vector<int> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw GuandanError("network needs at least one layer");
  if (widths_.back() != 1) throw GuandanError("network output width must be 1");
  std::size_t total = 0;
  for (int l = 0; l + 1 < static_cast<int>(widths_.size()); ++l) {
    if (widths_[l] <= 0 || widths_[l + 1] <= 0) throw GuandanError("layer widths must be positive");
    offsets_.push_back(total);
    total += static_cast<std::size_t>(widths_[l]) * widths_[l + 1] + widths_[l + 1];
  }
  params_.assign(total, T(0));
}

template <typename T>
std::vector<int> Mlp<T>::default_widths() {
  return {kInputDim, 512, 512, 512, 512, 512, 1};
}

template <typename T>
void Mlp<T>::init_he_uniform(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (int l = 0; l < num_layers(); ++l) {
    const double bound = std::sqrt(6.0 / widths_[l]);
    std::uniform_real_distribution<double> dist(-bound, bound);
    T* w = weight(l);
    for (int i = 0; i < widths_[l] * widths_[l + 1]; ++i) w[i] = static_cast<T>(dist(rng));
    std::fill(bias(l), bias(l) + widths_[l + 1], T(0));
  }
}

template <typename T>
void Mlp<T>::forward(const T* x, int n, T* q, Backend backend) const {
  Tape tape;
  forward_train(x, n, tape, q, backend);
}

template <typename T>
T Mlp<T>::forward_one(std::span<const T> x) const {
  if (static_cast<int>(x.size()) != input_dim()) throw GuandanError("input has wrong dimension");
  T q;
  forward(x.data(), 1, &q);
  return q;
}

template <typename T>
void Mlp<T>::forward_train(const T* x, int n, Tape& tape, T* q, Backend backend) const {
  if (params_.empty()) throw GuandanError("network has no layers");
  tape.n = n;
  tape.acts.resize(widths_.size());
  tape.acts[0].assign(x, x + static_cast<std::size_t>(n) * widths_[0]);
  for (int l = 0; l < num_layers(); ++l) {
    const bool last = l + 1 == num_layers();
    tape.acts[l + 1].resize(static_cast<std::size_t>(n) * widths_[l + 1]);
    kernels::dense_forward(tape.acts[l].data(), n, widths_[l], weight(l), bias(l), widths_[l + 1], !last,
                           tape.acts[l + 1].data(), backend);
  }
  std::copy(tape.acts.back().begin(), tape.acts.back().end(), q);
}

template <typename T>
void Mlp<T>::backward(const Tape& tape, const T* dq, T* grad, Backend backend) const {
  const int n = tape.n;
  std::vector<T> dy(dq, dq + n);
  std::vector<T> dx;
  for (int l = num_layers() - 1; l >= 0; --l) {
    const int in = widths_[l], out = widths_[l + 1];
    T* dw = grad + offsets_[l];
    T* db = dw + static_cast<std::size_t>(in) * out;
    const bool need_dx = l > 0;
    if (need_dx) dx.resize(static_cast<std::size_t>(n) * in);
    kernels::dense_backward(tape.acts[l].data(), n, in, weight(l), out, dy.data(), dw, db,
                            need_dx ? dx.data() : nullptr, backend);
    if (!need_dx) break;
    // Through the ReLU that produced acts[l].
    const auto& a = tape.acts[l];
    for (std::size_t i = 0; i < dx.size(); ++i) {
      if (a[i] <= T(0)) dx[i] = T(0);
    }
    dy.swap(dx);
  }
}

template <typename T>
T Mlp<T>::mse_gradient(const T* x, const T* targets, int n, T* grad, Backend backend) const {
  if (n <= 0) throw GuandanError("empty batch");
  Tape tape;
  std::vector<T> q(n), dq(n);
  forward_train(x, n, tape, q.data(), backend);
  T loss = 0;
  for (int i = 0; i < n; ++i) {
    const T e = q[i] - targets[i];
    loss += e * e;
    dq[i] = T(2) * e / T(n);
  }
  backward(tape, dq.data(), grad, backend);
  return loss / T(n);
}

template <typename T>
void Mlp<T>::q_values(const T* state, const T* actions, int n, T* q) const {
  if (input_dim() != kInputDim) throw GuandanError("q_values needs a state-action network");
  if (n <= 0) return;
  using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vec = Eigen::Matrix<T, 1, Eigen::Dynamic>;
  const int h = widths_[1];
  Eigen::Map<const RowMat> w0(weight(0), h, kInputDim);
  Eigen::Map<const Vec> s(state, kStateDim);
  Vec base = s * w0.leftCols(kStateDim).transpose() + Eigen::Map<const Vec>(bias(0), h);

  // Action columns as a contiguous copy so the product runs on packed data.
  RowMat wa = w0.rightCols(kActionDim);
  Eigen::Map<const RowMat> a(actions, n, kActionDim);
  RowMat cur(n, h);
  cur.noalias() = a * wa.transpose();
  cur.rowwise() += base;
  if (num_layers() > 1) cur = cur.cwiseMax(T(0));

  RowMat next;
  for (int l = 1; l < num_layers(); ++l) {
    const bool last = l + 1 == num_layers();
    next.resize(n, widths_[l + 1]);
    kernels::dense_forward(cur.data(), n, widths_[l], weight(l), bias(l), widths_[l + 1], !last, next.data(),
                           Backend::kParallel);
    cur.swap(next);
  }
  std::copy(cur.data(), cur.data() + n, q);
}

template class Mlp<float>;
template class Mlp<double>;

std::string serialize(const QNet& net) {
  ByteWriter w;
  w.put(kCheckpointMagic);
  w.put(kCheckpointFormat);
  w.put(static_cast<std::uint32_t>(net.widths().size()));
  for (int width : net.widths()) w.put(static_cast<std::uint32_t>(width));
  w.put(static_cast<std::uint64_t>(net.version()));
  w.put_span(std::span<const float>(net.params()));
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(w.str().data()), static_cast<uInt>(w.size())));
  w.put(crc);
  return std::move(w.str());
}

QNet deserialize(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.get<std::uint32_t>() != kCheckpointMagic) throw FormatError("not a checkpoint (bad magic)", 0);
  if (r.get<std::uint32_t>() != kCheckpointFormat) throw FormatError("unsupported checkpoint format", 4);
  const auto count = r.get<std::uint32_t>();
  if (count < 2 || count > kMaxLayers) r.fail("implausible layer count");
  std::vector<int> widths;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto width = r.get<std::uint32_t>();
    if (width == 0 || width > kMaxWidth) r.fail("implausible layer width");
    widths.push_back(static_cast<int>(width));
  }
  if (widths.back() != 1) r.fail("output width is not 1");
  std::uint64_t total = 0;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) total += std::uint64_t(widths[l]) * widths[l + 1] + widths[l + 1];
  const auto version = r.get<std::uint64_t>();
  if (r.remaining() < total * sizeof(float) + sizeof(std::uint32_t)) r.fail("truncated parameters");
  QNet net(widths);
  net.set_version(version);
  r.get_span(net.params());
  const std::size_t crc_offset = r.offset();
  const auto expected = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(crc_offset)));
  if (r.get<std::uint32_t>() != expected) throw FormatError("checksum mismatch", crc_offset);
  if (!r.done()) r.fail("trailing bytes");
  return net;
}

void save_checkpoint(const std::string& path, const QNet& net) { write_file(path, serialize(net)); }

QNet load_checkpoint(const std::string& path) { return deserialize(read_file(path)); }

void Sgd::step(std::span<float> params, std::span<const float> grad) {
  for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr_ * grad[i];
}

void Adam::step(std::span<float> params, std::span<const float> grad) {
  if (m_.size() != params.size()) {
    m_.assign(params.size(), 0.0f);
    v_.assign(params.size(), 0.0f);
    t_ = 0;
  }
  ++t_;
  const float c1 = 1.0f - std::pow(beta1_, static_cast<float>(t_));
  const float c2 = 1.0f - std::pow(beta2_, static_cast<float>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0f - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0f - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

std::unique_ptr<Optimizer> make_optimizer(const std::string& name, float lr) {
  if (name == "sgd") return std::make_unique<Sgd>(lr);
  if (name == "adam") return std::make_unique<Adam>(lr);
  throw GuandanError("unknown optimizer '" + name + "' (expected sgd or adam)");
}

}  // namespace guandan
