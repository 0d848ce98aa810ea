// Copyright 2026 The fairrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include "fairrank/simd/kernels.h"

namespace fairrank::simd {
namespace {

double DotScalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void AxpyScalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void ScaleScalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = alpha * x[i];
}

void AdamScalar(double* param, double* m, double* v, const double* grad,
                std::size_t n, const AdamStep& step) {
  const double one_minus_b1 = 1.0 - step.beta1;
  const double one_minus_b2 = 1.0 - step.beta2;
  const double lr_hat = step.learning_rate / step.bias_correction1;
  const double inv_bc2 = 1.0 / step.bias_correction2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = step.beta1 * m[i] + one_minus_b1 * g;
    v[i] = step.beta2 * v[i] + one_minus_b2 * (g * g);
    const double denom = std::sqrt(v[i] * inv_bc2) + step.epsilon;
    param[i] -= lr_hat * m[i] / denom;
  }
}

}  // namespace

const KernelTable& ScalarKernels() {
  static const KernelTable table{"scalar", DotScalar, AxpyScalar, ScaleScalar,
                                 AdamScalar};
  return table;
}

}  // namespace fairrank::simd
