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

// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include <cmath>

#include "fairrank/simd/kernels.h"

namespace fairrank::simd {
namespace {

double DotAvx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  const __m256d acc = _mm256_add_pd(acc0, acc1);
  const __m128d lo = _mm256_castpd256_pd128(acc);
  const __m128d hi = _mm256_extractf128_pd(acc, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  double sum = _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void AxpyAvx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(a, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void ScaleAvx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d a = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_mul_pd(a, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) y[i] = alpha * x[i];
}

void AdamAvx2(double* param, double* m, double* v, const double* grad,
              std::size_t n, const AdamStep& step) {
  const double one_minus_b1 = 1.0 - step.beta1;
  const double one_minus_b2 = 1.0 - step.beta2;
  const double lr_hat = step.learning_rate / step.bias_correction1;
  const double inv_bc2 = 1.0 / step.bias_correction2;
  const __m256d b1 = _mm256_set1_pd(step.beta1);
  const __m256d b2 = _mm256_set1_pd(step.beta2);
  const __m256d c1 = _mm256_set1_pd(one_minus_b1);
  const __m256d c2 = _mm256_set1_pd(one_minus_b2);
  const __m256d lr = _mm256_set1_pd(lr_hat);
  const __m256d ibc2 = _mm256_set1_pd(inv_bc2);
  const __m256d eps = _mm256_set1_pd(step.epsilon);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)),
                               _mm256_mul_pd(c1, g));
    __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                               _mm256_mul_pd(c2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d denom =
        _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vi, ibc2)), eps);
    const __m256d delta = _mm256_div_pd(_mm256_mul_pd(lr, mi), denom);
    _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), delta));
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

const KernelTable& Avx2KernelTable() {
  static const KernelTable table{"avx2", DotAvx2, AxpyAvx2, ScaleAvx2, AdamAvx2};
  return table;
}

}  // namespace fairrank::simd
