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
#include <vector>

#include "fairrank/model.h"

namespace fairrank {

struct ScoredItem {
  ItemId item;
  double score;

  friend bool operator==(const ScoredItem&, const ScoredItem&) = default;
};

// Top-k lists, best first. lists[u] may be shorter than k when the user has
// fewer than k candidates; short_lists counts those users.
struct RankedLists {
  std::int32_t k = 10;
  std::vector<std::vector<ScoredItem>> lists;
  std::int32_t short_lists = 0;
};

// Highest scoring non-excluded items per user, ties to the lower item id.
// exclude[u] must be sorted; an empty outer vector excludes nothing.
RankedLists RankTopK(const FactorModel& model, std::int32_t k,
                     const std::vector<std::vector<ItemId>>& exclude);

// Same selection over precomputed scores for a single user.
std::vector<ScoredItem> TopKFromScores(std::span<const double> scores,
                                       std::int32_t k,
                                       std::span<const ItemId> exclude_sorted);

}  // namespace fairrank
