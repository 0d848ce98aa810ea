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
#include <span>
#include <vector>

#include "fairrank/simd/kernels.h"
#include "fairrank/types.h"

namespace fairrank {

// Row-major user and item embeddings; score(u, i) = <W_u, X_i>.
struct FactorModel {
  std::int32_t num_users = 0;
  std::int32_t num_items = 0;
  std::int32_t dim = 0;
  std::vector<double> user_factors;
  std::vector<double> item_factors;

  FactorModel() = default;
  FactorModel(std::int32_t users, std::int32_t items, std::int32_t d)
      : num_users(users),
        num_items(items),
        dim(d),
        user_factors(static_cast<std::size_t>(users) * d),
        item_factors(static_cast<std::size_t>(items) * d) {}

  std::span<double> user(UserId u) {
    return {user_factors.data() + static_cast<std::size_t>(u) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<const double> user(UserId u) const {
    return {user_factors.data() + static_cast<std::size_t>(u) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<double> item(ItemId i) {
    return {item_factors.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }
  std::span<const double> item(ItemId i) const {
    return {item_factors.data() + static_cast<std::size_t>(i) * dim,
            static_cast<std::size_t>(dim)};
  }

  double Score(UserId u, ItemId i) const { return simd::Dot(user(u), item(i)); }

  // scores[i] = Score(u, i) for every item.
  void ScoreAll(UserId u, std::span<double> scores) const;

  bool AllFinite() const;

  friend bool operator==(const FactorModel&, const FactorModel&) = default;
};

}  // namespace fairrank
