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

// Built only for AArch64 targets.
#include <arm_neon.h>

#include <cmath>

#include "fairrank/simd/kernels.h"

namespace fairrank::simd {
namespace {

double DotNeon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void AxpyNeon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(a, vld1q_f64(x + i))));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void ScaleNeon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vmulq_f64(a, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] = alpha * x[i];
}

void AdamNeon(double* param, double* m, double* v, const double* grad,
              std::size_t n, const AdamStep& step) {
  const double one_minus_b1 = 1.0 - step.beta1;
  const double one_minus_b2 = 1.0 - step.beta2;
  const double lr_hat = step.learning_rate / step.bias_correction1;
  const double inv_bc2 = 1.0 / step.bias_correction2;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t g = vld1q_f64(grad + i);
    const float64x2_t mi = vaddq_f64(vmulq_n_f64(vld1q_f64(m + i), step.beta1),
                                     vmulq_n_f64(g, one_minus_b1));
    const float64x2_t vi =
        vaddq_f64(vmulq_n_f64(vld1q_f64(v + i), step.beta2),
                  vmulq_n_f64(vmulq_f64(g, g), one_minus_b2));
    vst1q_f64(m + i, mi);
    vst1q_f64(v + i, vi);
    const float64x2_t denom = vaddq_f64(vsqrtq_f64(vmulq_n_f64(vi, inv_bc2)),
                                        vdupq_n_f64(step.epsilon));
    const float64x2_t delta = vdivq_f64(vmulq_n_f64(mi, lr_hat), denom);
    vst1q_f64(param + i, vsubq_f64(vld1q_f64(param + i), delta));
  }
  for (; i < n; ++i) {
    const double g = grad[i];
    m[i] = step.beta1 * m[i] + one_minus_b1 * g;
    v[i] = step.beta2 * v[i] + one_minus_b2 * (g * g);
    const double denom = std::sqrt(v[i] * inv_bc2) + step.epsilon;
    param[i] -= lr_hat * m[i] / denom;
  }
}

}  // namespace

const KernelTable& NeonKernelTable() {
  static const KernelTable table{"neon", DotNeon, AxpyNeon, ScaleNeon, AdamNeon};
  return table;
}

}  // namespace fairrank::simd
