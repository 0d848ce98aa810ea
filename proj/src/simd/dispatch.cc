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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "fairrank/simd/kernels.h"

namespace fairrank::simd {

#if defined(FAIRRANK_HAVE_AVX2)
const KernelTable& Avx2KernelTable();
#endif
#if defined(FAIRRANK_HAVE_NEON)
const KernelTable& NeonKernelTable();
#endif

const KernelTable* Avx2Kernels() {
#if defined(FAIRRANK_HAVE_AVX2)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return &Avx2KernelTable();
  }
#endif
  return nullptr;
}

const KernelTable* NeonKernels() {
#if defined(FAIRRANK_HAVE_NEON)
  return &NeonKernelTable();
#else
  return nullptr;
#endif
}

const KernelTable* KernelsByName(std::string_view name) {
  if (name == "scalar") return &ScalarKernels();
  if (name == "avx2") return Avx2Kernels();
  if (name == "neon") return NeonKernels();
  return nullptr;
}

namespace {

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* Select() {
  const char* forced = std::getenv("FAIRRANK_SIMD");
  if (forced != nullptr) {
    const KernelTable* table = KernelsByName(forced);
    return table != nullptr ? table : &ScalarKernels();
  }
  if (const KernelTable* t = Avx2Kernels()) return t;
  if (const KernelTable* t = NeonKernels()) return t;
  return &ScalarKernels();
}

}  // namespace

const KernelTable& ActiveKernels() {
  const KernelTable* table = g_active.load(std::memory_order_acquire);
  if (table == nullptr) {
    table = Select();
    g_active.store(table, std::memory_order_release);
  }
  return *table;
}

void OverrideKernels(const KernelTable* table) {
  g_active.store(table, std::memory_order_release);
}

}  // namespace fairrank::simd
