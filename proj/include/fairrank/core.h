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
#include <optional>
#include <vector>

#include "fairrank/types.h"

namespace fairrank {

struct Interaction {
  UserId user = 0;
  ItemId item = 0;
  double rating = 1.0;
  std::optional<std::int64_t> timestamp;
  Provenance provenance = Provenance::kBase;

  friend bool operator==(const Interaction&, const Interaction&) = default;
};

// Users, items, binarized interactions and the item -> provider -> attribute
// chain. Ids are dense. After upsampling the interaction list is a multiset;
// base rows stay unique per (user, item).
struct Dataset {
  std::int32_t num_users = 0;
  std::int32_t num_items = 0;
  std::vector<Interaction> interactions;
  std::vector<std::vector<ProviderId>> item_providers;  // indexed by item
  std::vector<AttributeClass> provider_attribute;       // indexed by provider
  std::int32_t attribute_cardinality = 2;

  std::int32_t num_providers() const {
    return static_cast<std::int32_t>(provider_attribute.size());
  }

  // Same users/items/metadata, no interactions.
  Dataset EmptyCopy() const;

  // Throws ValidationError naming the first violated invariant.
  void Validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Per-item provider counts per attribute class and their normalized share.
struct SensitiveRepresentation {
  std::vector<std::int32_t> counts;
  std::vector<double> share;

  std::int32_t total() const;
};

using Representations = std::vector<SensitiveRepresentation>;  // by item

struct GroupStats {
  std::vector<double> catalog_repr;      // C^a
  std::vector<double> interaction_repr;  // O^a
  AttributeClass minority_class = 0;

  double catalog_minority() const { return catalog_repr[minority_class]; }
  double interaction_minority() const {
    return interaction_repr[minority_class];
  }
};

Representations BuildSensitiveRepresentation(const Dataset& dataset);

// Catalog share averages over items; interaction share averages over every
// interaction row (duplicates count). Minority is the lowest catalog share,
// ties to the lowest class index, unless a class is designated.
GroupStats ComputeGroupStats(const Dataset& dataset, const Representations& reprs,
                             std::optional<AttributeClass> designated_minority = {});

// Sum over interaction rows of share[cls] (the numerator of O^cls).
double InteractionMass(const Dataset& dataset, const Representations& reprs,
                       AttributeClass cls);

// Sorted, de-duplicated item lists per user.
std::vector<std::vector<ItemId>> ItemsByUser(const Dataset& dataset);

// Interaction rows per item.
std::vector<std::int64_t> ItemPopularity(const Dataset& dataset);

}  // namespace fairrank
