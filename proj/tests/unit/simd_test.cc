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
#include <vector>

#include "fairrank/rng.h"
#include "fairrank/simd/kernels.h"
#include "gtest/gtest.h"

namespace fairrank::simd {
namespace {

std::vector<const KernelTable*> Variants() {
  std::vector<const KernelTable*> v;
  if (const KernelTable* t = Avx2Kernels()) v.push_back(t);
  if (const KernelTable* t = NeonKernels()) v.push_back(t);
  return v;
}

std::vector<double> RandomVector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.Uniform(-2.0, 2.0);
  return v;
}

// Lengths covering empty, tails and multi-block bodies.
const std::size_t kLengths[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 100, 257};

TEST(ScalarKernels, DotMatchesDefinition) {
  const double a[] = {1.0, 2.0, 3.0};
  const double b[] = {4.0, -5.0, 6.0};
  EXPECT_EQ(ScalarKernels().dot(a, b, 3), 12.0);
  EXPECT_EQ(ScalarKernels().dot(a, b, 0), 0.0);
}

TEST(ScalarKernels, AxpyAndScale) {
  const double x[] = {1.0, -2.0};
  double y[] = {10.0, 10.0};
  ScalarKernels().axpy(0.5, x, y, 2);
  EXPECT_EQ(y[0], 10.5);
  EXPECT_EQ(y[1], 9.0);
  ScalarKernels().scale(-2.0, x, y, 2);
  EXPECT_EQ(y[0], -2.0);
  EXPECT_EQ(y[1], 4.0);
}

TEST(ScalarKernels, AdamMatchesHandStep) {
  double p = 1.0, m = 0.0, v = 0.0;
  const double g = 0.5;
  const AdamStep step{0.1, 0.9, 0.999, 1e-8, 1.0 - 0.9, 1.0 - 0.999};
  ScalarKernels().adam_update(&p, &m, &v, &g, 1, step);
  // First bias-corrected step moves by lr * g / (|g| + eps') = ~lr.
  EXPECT_NEAR(m, 0.05, 1e-15);
  EXPECT_NEAR(v, 0.00025, 1e-15);
  EXPECT_NEAR(p, 1.0 - 0.1 * (0.05 / 0.1) / (std::sqrt(0.00025 / 0.001) + 1e-8), 1e-15);
}

TEST(KernelEquivalence, DotAgreesToRounding) {
  Rng rng(3);
  for (const KernelTable* t : Variants()) {
    for (std::size_t n : kLengths) {
      const std::vector<double> a = RandomVector(rng, n);
      const std::vector<double> b = RandomVector(rng, n);
      const double ref = ScalarKernels().dot(a.data(), b.data(), n);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i] * b[i]);
      EXPECT_NEAR(t->dot(a.data(), b.data(), n), ref, 1e-14 * (mag + 1.0))
          << t->name << " n=" << n;
    }
  }
}

TEST(KernelEquivalence, ElementwiseKernelsAreBitIdentical) {
  Rng rng(4);
  for (const KernelTable* t : Variants()) {
    for (std::size_t n : kLengths) {
      const std::vector<double> x = RandomVector(rng, n);
      std::vector<double> y1 = RandomVector(rng, n);
      std::vector<double> y2 = y1;
      ScalarKernels().axpy(0.37, x.data(), y1.data(), n);
      t->axpy(0.37, x.data(), y2.data(), n);
      EXPECT_EQ(y1, y2) << t->name << " axpy n=" << n;

      ScalarKernels().scale(-1.3, x.data(), y1.data(), n);
      t->scale(-1.3, x.data(), y2.data(), n);
      EXPECT_EQ(y1, y2) << t->name << " scale n=" << n;

      std::vector<double> p1 = RandomVector(rng, n), m1 = RandomVector(rng, n);
      std::vector<double> v1(n);
      for (double& e : v1) e = rng.Uniform(0.0, 1.0);
      std::vector<double> p2 = p1, m2 = m1, v2 = v1;
      const std::vector<double> g = RandomVector(rng, n);
      const AdamStep step{0.01, 0.9, 0.999, 1e-8, 1.0 - 0.9 * 0.9, 1.0 - 0.999 * 0.999};
      ScalarKernels().adam_update(p1.data(), m1.data(), v1.data(), g.data(), n, step);
      t->adam_update(p2.data(), m2.data(), v2.data(), g.data(), n, step);
      EXPECT_EQ(p1, p2) << t->name << " adam n=" << n;
      EXPECT_EQ(m1, m2);
      EXPECT_EQ(v1, v2);
    }
  }
}

TEST(Dispatch, ActiveIsAKnownVariant) {
  const KernelTable& active = ActiveKernels();
  EXPECT_EQ(KernelsByName(active.name), &active);
  EXPECT_EQ(KernelsByName("scalar"), &ScalarKernels());
  EXPECT_EQ(KernelsByName("nonsense"), nullptr);
}

TEST(Dispatch, OverrideSwitchesTable) {
  const KernelTable* before = &ActiveKernels();
  OverrideKernels(&ScalarKernels());
  EXPECT_EQ(&ActiveKernels(), &ScalarKernels());
  OverrideKernels(before);
  EXPECT_EQ(&ActiveKernels(), before);
}

}  // namespace
}  // namespace fairrank::simd
