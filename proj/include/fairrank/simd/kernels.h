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

#pragma once

#include <cstddef>
#include <span>
#include <string_view>

namespace fairrank::simd {

// Bias-corrected Adam step coefficients for a single update.
struct AdamStep {
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  double bias_correction1;  // 1 - beta1^t
  double bias_correction2;  // 1 - beta2^t
};

// Function table for one instruction set. All variants produce the same
// results for Axpy/Scale/AdamUpdate; Dot differs only by summation order.
struct KernelTable {
  std::string_view name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = alpha * x
  void (*scale)(double alpha, const double* x, double* y, std::size_t n);
  void (*adam_update)(double* param, double* m, double* v, const double* grad,
                      std::size_t n, const AdamStep& step);
};

const KernelTable& ScalarKernels();
// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* Avx2Kernels();
const KernelTable* NeonKernels();

// Variant by table name; nullptr when unknown or unsupported.
const KernelTable* KernelsByName(std::string_view name);

// Picks the widest supported variant once. FAIRRANK_SIMD=scalar|avx2|neon
// forces a choice (unsupported requests fall back to scalar).
const KernelTable& ActiveKernels();

// Test hook; resets the cached choice. Not thread-safe.
void OverrideKernels(const KernelTable* table);

inline double Dot(std::span<const double> a, std::span<const double> b) {
  return ActiveKernels().dot(a.data(), b.data(), a.size());
}
inline void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  ActiveKernels().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace fairrank::simd
