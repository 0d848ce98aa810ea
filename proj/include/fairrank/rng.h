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

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace fairrank {

// Seedable generator whose draws are identical on every platform. Wraps
// std::mt19937_64 with portable derived distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 bits of precision.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double Uniform(double low, double high) {
    return low + (high - low) * Uniform();
  }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t UniformInt(std::uint64_t bound);

  // Exponential variate with the given scale (mean == standard deviation).
  double Exponential(double scale);

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = UniformInt(i);
      std::swap(values[i - 1], values[j]);
    }
  }
  template <typename T>
  void Shuffle(std::vector<T>& values) {
    Shuffle(std::span<T>(values));
  }

  // Child generator seeded from this stream, for per-partition work.
  Rng Fork() { return Rng(engine_()); }

 private:
  std::mt19937_64 engine_;
};

// Draws indices proportionally to non-negative weights.
class WeightedSampler {
 public:
  explicit WeightedSampler(std::span<const double> weights);

  // Index in [0, weights.size()). Requires total() > 0.
  std::size_t Sample(Rng& rng) const;
  double total() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace fairrank
