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

// Dense-layer kernels. Matrices are row-major; W is out x in.

#ifndef GUANDAN_KERNELS_H_
#define GUANDAN_KERNELS_H_

#include "guandan/qnet.h"

namespace guandan::kernels {

// y = x * W^T + b, then ReLU if `relu`. x is n x in, y is n x out.
template <typename T>
void dense_forward(const T* x, int n, int in, const T* w, const T* b, int out, bool relu, T* y, Backend backend);

// From dy (n x out): dw = dy^T x, db = column sums of dy, dx = dy W (skipped
// when dx is null). dw and db are overwritten.
template <typename T>
void dense_backward(const T* x, int n, int in, const T* w, int out, const T* dy, T* dw, T* db, T* dx, Backend backend);

}  // namespace guandan::kernels

#endif  // GUANDAN_KERNELS_H_
