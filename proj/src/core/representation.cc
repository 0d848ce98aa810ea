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

#include <fmt/format.h>
#include <numeric>

#include "fairrank/core.h"

namespace fairrank {

std::int32_t SensitiveRepresentation::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

Representations BuildSensitiveRepresentation(const Dataset& dataset) {
  const std::int32_t classes = dataset.attribute_cardinality;
  Representations reprs(dataset.num_items);
  for (ItemId i = 0; i < dataset.num_items; ++i) {
    const auto& providers = dataset.item_providers[i];
    if (providers.empty()) {
      throw ValidationError(fmt::format("item {} has no providers", i));
    }
    SensitiveRepresentation& r = reprs[i];
    r.counts.assign(classes, 0);
    for (ProviderId p : providers) {
      const AttributeClass a = dataset.provider_attribute.at(p);
      if (a < 0 || a >= classes) {
        throw ValidationError(fmt::format(
            "item {}: provider {} has attribute class {} outside [0, {})", i,
            p, a, classes));
      }
      ++r.counts[a];
    }
    const double total = static_cast<double>(providers.size());
    r.share.resize(classes);
    for (std::int32_t a = 0; a < classes; ++a) r.share[a] = r.counts[a] / total;
  }
  return reprs;
}

double InteractionMass(const Dataset& dataset, const Representations& reprs,
                       AttributeClass cls) {
  double mass = 0.0;
  for (const Interaction& x : dataset.interactions) mass += reprs[x.item].share[cls];
  return mass;
}

GroupStats ComputeGroupStats(const Dataset& dataset, const Representations& reprs,
                             std::optional<AttributeClass> designated_minority) {
  if (dataset.num_items == 0) throw ValidationError("empty catalog");
  if (dataset.interactions.empty()) {
    throw ValidationError("empty interaction set");
  }
  if (static_cast<std::int32_t>(reprs.size()) != dataset.num_items) {
    throw ValidationError("representations do not cover every item");
  }
  const std::int32_t classes = dataset.attribute_cardinality;
  GroupStats stats;
  stats.catalog_repr.assign(classes, 0.0);
  stats.interaction_repr.assign(classes, 0.0);
  for (const SensitiveRepresentation& r : reprs) {
    for (std::int32_t a = 0; a < classes; ++a) stats.catalog_repr[a] += r.share[a];
  }
  for (const Interaction& x : dataset.interactions) {
    const auto& share = reprs[x.item].share;
    for (std::int32_t a = 0; a < classes; ++a) stats.interaction_repr[a] += share[a];
  }
  const double items = dataset.num_items;
  const double rows = static_cast<double>(dataset.interactions.size());
  for (std::int32_t a = 0; a < classes; ++a) {
    stats.catalog_repr[a] /= items;
    stats.interaction_repr[a] /= rows;
  }
  if (designated_minority) {
    if (*designated_minority < 0 || *designated_minority >= classes) {
      throw ValidationError(fmt::format("designated minority class {} outside [0, {})",
                                        *designated_minority, classes));
    }
    stats.minority_class = *designated_minority;
    return stats;
  }
  stats.minority_class = 0;
  for (std::int32_t a = 1; a < classes; ++a) {
    if (stats.catalog_repr[a] < stats.catalog_repr[stats.minority_class]) {
      stats.minority_class = a;
    }
  }
  return stats;
}

}  // namespace fairrank
