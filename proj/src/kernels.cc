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

#include "guandan/kernels.h"

#include <Eigen/Dense>
#include <algorithm>

namespace guandan::kernels {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;
template <typename T>
using ConstMapVec = Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>;

constexpr int kRowBlock = 64;
constexpr int kMinParallelRows = 2 * kRowBlock;

template <typename T>
void forward_serial(const T* x, int n, int in, const T* w, const T* b, int out, bool relu, T* y) {
  for (int r = 0; r < n; ++r) {
    for (int o = 0; o < out; ++o) {
      T acc = b[o];
      for (int i = 0; i < in; ++i) acc += x[r * in + i] * w[o * in + i];
      y[r * out + o] = relu && acc < T(0) ? T(0) : acc;
    }
  }
}

template <typename T>
void backward_serial(const T* x, int n, int in, const T* w, int out, const T* dy, T* dw, T* db, T* dx) {
  std::fill(dw, dw + static_cast<std::size_t>(out) * in, T(0));
  std::fill(db, db + out, T(0));
  for (int r = 0; r < n; ++r) {
    for (int o = 0; o < out; ++o) {
      const T g = dy[r * out + o];
      db[o] += g;
      for (int i = 0; i < in; ++i) dw[o * in + i] += g * x[r * in + i];
    }
  }
  if (!dx) return;
  for (int r = 0; r < n; ++r) {
    for (int i = 0; i < in; ++i) {
      T acc = 0;
      for (int o = 0; o < out; ++o) acc += dy[r * out + o] * w[o * in + i];
      dx[r * in + i] = acc;
    }
  }
}

template <typename T>
void forward_parallel(const T* x, int n, int in, const T* w, const T* b, int out, bool relu, T* y) {
  ConstMapMat<T> W(w, out, in);
  ConstMapVec<T> B(b, out);
  const int blocks = (n + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(static) if (n >= kMinParallelRows)
  for (int blk = 0; blk < blocks; ++blk) {
    const int r0 = blk * kRowBlock;
    const int rows = std::min(kRowBlock, n - r0);
    ConstMapMat<T> X(x + static_cast<std::size_t>(r0) * in, rows, in);
    MapMat<T> Y(y + static_cast<std::size_t>(r0) * out, rows, out);
    Y.noalias() = X * W.transpose();
    Y.rowwise() += B;
    if (relu) Y = Y.cwiseMax(T(0));
  }
}

template <typename T>
void backward_parallel(const T* x, int n, int in, const T* w, int out, const T* dy, T* dw, T* db, T* dx) {
  ConstMapMat<T> X(x, n, in);
  ConstMapMat<T> DY(dy, n, out);
  ConstMapMat<T> W(w, out, in);
  // Split dW by output rows so threads never share an accumulator.
  const int blocks = (out + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(static) if (out >= kMinParallelRows)
  for (int blk = 0; blk < blocks; ++blk) {
    const int o0 = blk * kRowBlock;
    const int cols = std::min(kRowBlock, out - o0);
    MapMat<T> DW(dw + static_cast<std::size_t>(o0) * in, cols, in);
    DW.noalias() = DY.middleCols(o0, cols).transpose() * X;
  }
  Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(db, out) = DY.colwise().sum();
  if (!dx) return;
  const int row_blocks = (n + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(static) if (n >= kMinParallelRows)
  for (int blk = 0; blk < row_blocks; ++blk) {
    const int r0 = blk * kRowBlock;
    const int rows = std::min(kRowBlock, n - r0);
    MapMat<T> DX(dx + static_cast<std::size_t>(r0) * in, rows, in);
    DX.noalias() = DY.middleRows(r0, rows) * W;
  }
}

}  // namespace

template <typename T>
void dense_forward(const T* x, int n, int in, const T* w, const T* b, int out, bool relu, T* y, Backend backend) {
  if (n <= 0) return;
  if (backend == Backend::kSerial) {
    forward_serial(x, n, in, w, b, out, relu, y);
  } else {
    forward_parallel(x, n, in, w, b, out, relu, y);
  }
}

template <typename T>
void dense_backward(const T* x, int n, int in, const T* w, int out, const T* dy, T* dw, T* db, T* dx,
                    Backend backend) {
  if (backend == Backend::kSerial) {
    backward_serial(x, n, in, w, out, dy, dw, db, dx);
  } else {
    backward_parallel(x, n, in, w, out, dy, dw, db, dx);
  }
}

template void dense_forward<float>(const float*, int, int, const float*, const float*, int, bool, float*, Backend);
template void dense_forward<double>(const double*, int, int, const double*, const double*, int, bool, double*,
                                    Backend);
template void dense_backward<float>(const float*, int, int, const float*, int, const float*, float*, float*, float*,
                                    Backend);
template void dense_backward<double>(const double*, int, int, const double*, int, const double*, double*, double*,
                                     double*, Backend);

}  // namespace guandan::kernels
