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
#include <cmath>

#include "fairrank/ranking.h"

namespace fairrank {

void FactorModel::ScoreAll(UserId u, std::span<double> scores) const {
  const auto& k = simd::ActiveKernels();
  const double* w = user_factors.data() + static_cast<std::size_t>(u) * dim;
  for (ItemId i = 0; i < num_items; ++i) {
    scores[i] = k.dot(w, item_factors.data() + static_cast<std::size_t>(i) * dim,
                      static_cast<std::size_t>(dim));
  }
}

bool FactorModel::AllFinite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(user_factors.begin(), user_factors.end(), finite) &&
         std::all_of(item_factors.begin(), item_factors.end(), finite);
}

std::vector<ScoredItem> TopKFromScores(std::span<const double> scores,
                                       std::int32_t k,
                                       std::span<const ItemId> exclude_sorted) {
  std::vector<ScoredItem> candidates;
  candidates.reserve(scores.size());
  auto ex = exclude_sorted.begin();
  for (ItemId i = 0; i < static_cast<ItemId>(scores.size()); ++i) {
    while (ex != exclude_sorted.end() && *ex < i) ++ex;
    if (ex != exclude_sorted.end() && *ex == i) continue;
    candidates.push_back({i, scores[i]});
  }
  auto better = [](const ScoredItem& a, const ScoredItem& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.item < b.item;
  };
  const std::size_t take =
      std::min(candidates.size(), static_cast<std::size_t>(std::max(k, 0)));
  std::partial_sort(candidates.begin(), candidates.begin() + take,
                    candidates.end(), better);
  candidates.resize(take);
  return candidates;
}

RankedLists RankTopK(const FactorModel& model, std::int32_t k,
                     const std::vector<std::vector<ItemId>>& exclude) {
  if (k < 1) throw ValidationError("k must be at least 1");
  RankedLists out;
  out.k = k;
  out.lists.resize(model.num_users);
  std::vector<double> scores(model.num_items);
  for (UserId u = 0; u < model.num_users; ++u) {
    model.ScoreAll(u, scores);
    std::span<const ItemId> ex;
    if (!exclude.empty()) ex = exclude[u];
    out.lists[u] = TopKFromScores(scores, k, ex);
    if (static_cast<std::int32_t>(out.lists[u].size()) < k) ++out.short_lists;
  }
  return out;
}

}  // namespace fairrank
