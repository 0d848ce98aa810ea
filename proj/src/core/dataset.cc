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
#include <fmt/format.h>
#include <unordered_set>

#include "fairrank/core.h"

namespace fairrank {

Dataset Dataset::EmptyCopy() const {
  Dataset out;
  out.num_users = num_users;
  out.num_items = num_items;
  out.item_providers = item_providers;
  out.provider_attribute = provider_attribute;
  out.attribute_cardinality = attribute_cardinality;
  return out;
}

void Dataset::Validate() const {
  if (num_users < 0 || num_items < 0) {
    throw ValidationError("negative user or item count");
  }
  if (attribute_cardinality < 1) {
    throw ValidationError("attribute cardinality must be at least 1");
  }
  if (static_cast<std::int32_t>(item_providers.size()) != num_items) {
    throw ValidationError(fmt::format("item_providers has {} rows for {} items",
                                      item_providers.size(), num_items));
  }
  for (std::int32_t p = 0; p < num_providers(); ++p) {
    const AttributeClass a = provider_attribute[p];
    if (a < 0 || a >= attribute_cardinality) {
      throw ValidationError(fmt::format(
          "provider {} has attribute class {} outside [0, {})", p, a,
          attribute_cardinality));
    }
  }
  for (ItemId i = 0; i < num_items; ++i) {
    if (item_providers[i].empty()) {
      throw ValidationError(fmt::format("item {} has no providers", i));
    }
    for (ProviderId p : item_providers[i]) {
      if (p < 0 || p >= num_providers()) {
        throw ValidationError(
            fmt::format("item {} references unknown provider {}", i, p));
      }
    }
  }
  std::unordered_set<std::int64_t> base_pairs;
  base_pairs.reserve(interactions.size());
  for (const Interaction& x : interactions) {
    if (x.user < 0 || x.user >= num_users || x.item < 0 || x.item >= num_items) {
      throw ValidationError(fmt::format("interaction ({}, {}) out of range",
                                        x.user, x.item));
    }
    if (x.provenance != Provenance::kBase) continue;
    const std::int64_t key = static_cast<std::int64_t>(x.user) * num_items + x.item;
    if (!base_pairs.insert(key).second) {
      throw ValidationError(fmt::format("duplicate base interaction ({}, {})",
                                        x.user, x.item));
    }
  }
}

std::vector<std::vector<ItemId>> ItemsByUser(const Dataset& dataset) {
  std::vector<std::vector<ItemId>> out(dataset.num_users);
  for (const Interaction& x : dataset.interactions) out[x.user].push_back(x.item);
  for (auto& items : out) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
  return out;
}

std::vector<std::int64_t> ItemPopularity(const Dataset& dataset) {
  std::vector<std::int64_t> counts(dataset.num_items, 0);
  for (const Interaction& x : dataset.interactions) ++counts[x.item];
  return counts;
}

}  // namespace fairrank
