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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fmt/format.h>

#include "fairrank/hash.h"
#include "fairrank/rng.h"
#include "fairrank/types.h"

namespace fairrank {

std::string_view ProvenanceName(Provenance p) {
  switch (p) {
    case Provenance::kBase: return "base";
    case Provenance::kReal: return "upsampled:real";
    case Provenance::kFake: return "upsampled:fake";
    case Provenance::kFakeByPop: return "upsampled:fake_by_pop";
  }
  return "base";
}

Provenance ParseProvenance(std::string_view name) {
  if (name.empty() || name == "base") return Provenance::kBase;
  if (name == "upsampled:real") return Provenance::kReal;
  if (name == "upsampled:fake") return Provenance::kFake;
  if (name == "upsampled:fake_by_pop") return Provenance::kFakeByPop;
  throw ValidationError(fmt::format("unknown provenance '{}'", name));
}

std::uint64_t Rng::UniformInt(std::uint64_t bound) {
  // Rejection on the top of the range keeps every residue equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

double Rng::Exponential(double scale) {
  return -scale * std::log1p(-Uniform());
}

WeightedSampler::WeightedSampler(std::span<const double> weights) {
  cumulative_.reserve(weights.size());
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw ValidationError("sampling weights must be finite and non-negative");
    }
    total += w;
    cumulative_.push_back(total);
  }
}

std::size_t WeightedSampler::Sample(Rng& rng) const {
  const double target = rng.Uniform() * total();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t idx = static_cast<std::size_t>(it - cumulative_.begin());
  // upper_bound never lands on a zero-weight entry except when rounding puts
  // the target at the total; step back to the last positive weight then.
  if (idx >= cumulative_.size()) {
    idx = cumulative_.size() - 1;
    while (idx > 0 && cumulative_[idx] == cumulative_[idx - 1]) --idx;
  }
  return idx;
}

ContentHasher& ContentHasher::Update(std::span<const std::byte> bytes) {
  for (std::byte b : bytes) {
    state_ ^= static_cast<std::uint64_t>(b);
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

ContentHasher& ContentHasher::Update(std::string_view text) {
  Update(static_cast<std::uint64_t>(text.size()));
  return Update(std::as_bytes(std::span(text.data(), text.size())));
}

ContentHasher& ContentHasher::Update(std::uint64_t value) {
  std::byte raw[8];
  for (int i = 0; i < 8; ++i) {
    raw[i] = static_cast<std::byte>((value >> (8 * i)) & 0xff);
  }
  return Update(std::span<const std::byte>(raw, 8));
}

ContentHasher& ContentHasher::Update(double value) {
  return Update(std::bit_cast<std::uint64_t>(value));
}

std::string ContentHasher::hex() const { return fmt::format("{:016x}", state_); }

std::string HashHex(std::string_view text) {
  return ContentHasher().Update(text).hex();
}

}  // namespace fairrank
