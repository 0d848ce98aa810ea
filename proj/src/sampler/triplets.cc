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
#include <spdlog/spdlog.h>

#include "fairrank/rng.h"
#include "fairrank/sampler.h"

namespace fairrank::sampler {

TripletSet BuildTriplets(const Dataset& dataset, std::int32_t per_observation,
                         std::uint64_t seed) {
  if (per_observation < 1) {
    throw ValidationError("triplets per observation must be at least 1");
  }
  const auto positives = ItemsByUser(dataset);
  // Complement lists for users who have seen most of the catalog; rejection
  // sampling is used for everyone else.
  std::vector<std::vector<ItemId>> complements(dataset.num_users);
  std::vector<char> dense(dataset.num_users, 0);
  TripletSet out;
  for (UserId u = 0; u < dataset.num_users; ++u) {
    const auto& pos = positives[u];
    if (static_cast<std::int32_t>(pos.size()) >= dataset.num_items) {
      if (!pos.empty()) ++out.skipped_users;
      continue;
    }
    if (pos.size() * 2 > static_cast<std::size_t>(dataset.num_items)) {
      dense[u] = 1;
      auto it = pos.begin();
      for (ItemId i = 0; i < dataset.num_items; ++i) {
        while (it != pos.end() && *it < i) ++it;
        if (it == pos.end() || *it != i) complements[u].push_back(i);
      }
    }
  }
  if (out.skipped_users > 0) {
    spdlog::warn("{} users interacted with every item; their rows yield no triplets",
                 out.skipped_users);
  }

  Rng rng(seed);
  out.triplets.reserve(dataset.interactions.size() * per_observation);
  out.provenance.reserve(dataset.interactions.size() * per_observation);
  for (const Interaction& x : dataset.interactions) {
    const auto& pos = positives[x.user];
    if (static_cast<std::int32_t>(pos.size()) >= dataset.num_items) continue;
    for (std::int32_t t = 0; t < per_observation; ++t) {
      ItemId j;
      if (dense[x.user]) {
        const auto& c = complements[x.user];
        j = c[rng.UniformInt(c.size())];
      } else {
        do {
          j = static_cast<ItemId>(rng.UniformInt(dataset.num_items));
        } while (std::binary_search(pos.begin(), pos.end(), j));
      }
      out.triplets.push_back({x.user, x.item, j});
      out.provenance.push_back(x.provenance);
    }
  }
  return out;
}

}  // namespace fairrank::sampler
