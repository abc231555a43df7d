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

#ifndef GUANDAN_QNET_H_
#define GUANDAN_QNET_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "guandan/features.h"

namespace guandan {

// kParallel: OpenMP over row blocks, vectorized GEMM inside each block.
// kSerial: plain loops, the reference the parallel path is tested against.
enum class Backend { kParallel, kSerial };

// Dense layers, ReLU between them, linear scalar head. All parameters live in
// one flat buffer: for each layer, weights (out x in, row-major) then biases.
template <typename T>
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> widths);

  // 567 -> 5 x 512 -> 1.
  static std::vector<int> default_widths();

  // Uniform(-sqrt(6/fan_in), +sqrt(6/fan_in)) weights, zero biases.
  void init_he_uniform(std::uint64_t seed);

  const std::vector<int>& widths() const { return widths_; }
  int num_layers() const { return static_cast<int>(widths_.size()) - 1; }
  int input_dim() const { return widths_.front(); }
  std::size_t num_params() const { return params_.size(); }
  std::span<T> params() { return params_; }
  std::span<const T> params() const { return params_; }
  T* weight(int layer) { return params_.data() + offsets_[layer]; }
  const T* weight(int layer) const { return params_.data() + offsets_[layer]; }
  T* bias(int layer) { return weight(layer) + widths_[layer] * widths_[layer + 1]; }
  const T* bias(int layer) const { return weight(layer) + widths_[layer] * widths_[layer + 1]; }

  std::uint64_t version() const { return version_; }
  void set_version(std::uint64_t v) { version_ = v; }

  // x: n rows of input_dim(); q: n outputs.
  void forward(const T* x, int n, T* q, Backend backend = Backend::kParallel) const;
  T forward_one(std::span<const T> x) const;

  // One state against n candidate actions. The state's share of the first
  // layer is computed once. Requires input_dim() == kInputDim.
  void q_values(const T* state, const T* actions, int n, T* q) const;

  // Activations kept for the backward pass.
  struct Tape {
    int n = 0;
    std::vector<std::vector<T>> acts;  // acts[0] = input, acts[l] = post-ReLU output of layer l-1
  };
  void forward_train(const T* x, int n, Tape& tape, T* q, Backend backend = Backend::kParallel) const;
  // dq: dL/dq per row. Writes dL/dparams (overwrites grad, num_params long).
  void backward(const Tape& tape, const T* dq, T* grad, Backend backend = Backend::kParallel) const;

  // (1/n) sum (q - target)^2 and its gradient.
  T mse_gradient(const T* x, const T* targets, int n, T* grad, Backend backend = Backend::kParallel) const;

  template <typename U>
  Mlp<U> cast() const {
    Mlp<U> out(widths_);
    for (std::size_t i = 0; i < params_.size(); ++i) out.params()[i] = static_cast<U>(params_[i]);
    out.set_version(version_);
    return out;
  }

 private:
  std::vector<int> widths_;
  std::vector<std::size_t> offsets_;
  std::vector<T> params_;
  std::uint64_t version_ = 0;
};

extern template class Mlp<float>;
extern template class Mlp<double>;

using QNet = Mlp<float>;

// Checkpoint bytes: "GDQN", u32 format, u32 layer count + 1, u32 widths,
// u64 version, float32 parameters, u32 crc32 of everything before it.
std::string serialize(const QNet& net);
QNet deserialize(std::string_view bytes);
void save_checkpoint(const std::string& path, const QNet& net);
QNet load_checkpoint(const std::string& path);

class Optimizer {
 public:
  virtual ~Optimizer() = default;
  virtual void step(std::span<float> params, std::span<const float> grad) = 0;
};

class Sgd : public Optimizer {
 public:
  explicit Sgd(float lr) : lr_(lr) {}
  void step(std::span<float> params, std::span<const float> grad) override;

 private:
  float lr_;
};

class Adam : public Optimizer {
 public:
  explicit Adam(float lr, float beta1 = 0.9f, float beta2 = 0.999f, float eps = 1e-8f)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}
  void step(std::span<float> params, std::span<const float> grad) override;

 private:
  float lr_, beta1_, beta2_, eps_;
  std::vector<float> m_, v_;
  std::int64_t t_ = 0;
};

std::unique_ptr<Optimizer> make_optimizer(const std::string& name, float lr);

}  // namespace guandan

#endif  // GUANDAN_QNET_H_
