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
#include <string_view>
#include <vector>

#include "fairrank/core.h"

namespace fairrank::sampler {

enum class Strategy { kReal, kFake, kFakeByPop };

std::string_view StrategyName(Strategy s);
Strategy ParseStrategy(std::string_view name);
Provenance ProvenanceFor(Strategy s);

struct UpsampleConfig {
  Strategy strategy = Strategy::kReal;
  // Desired minority interaction share; defaults to the catalog share.
  std::optional<double> target_share;
  std::optional<std::int64_t> max_added;
  std::uint64_t seed = 7;
};

struct UpsampleResult {
  Dataset dataset;
  std::int64_t added = 0;
  std::int64_t planned = 0;  // closed-form estimate before drawing
  double share_before = 0.0;
  double share_after = 0.0;
  double target = 0.0;
  bool capped = false;  // stopped by max_added before reaching the target
};

// Appends minority interactions until the minority interaction share reaches
// the target. Base rows are never touched.
//   real:        item ~ minority share, duplicate one of its existing rows
//   fake:        item ~ minority share, new pair with a user who never saw it
//   fake_by_pop: minority-touched item ~ popularity, user as in fake
UpsampleResult Upsample(const Dataset& dataset, const Representations& reprs,
                        const GroupStats& stats, const UpsampleConfig& config);

struct Triplet {
  UserId user;
  ItemId positive;
  ItemId negative;

  friend bool operator==(const Triplet&, const Triplet&) = default;
};

struct TripletSet {
  std::vector<Triplet> triplets;
  std::vector<Provenance> provenance;  // parallel to triplets
  std::int64_t skipped_users = 0;      // users who saw every item

  std::size_t size() const { return triplets.size(); }
};

// per_observation triplets for each interaction row, negatives drawn
// uniformly from the items the user has not interacted with.
TripletSet BuildTriplets(const Dataset& dataset, std::int32_t per_observation,
                         std::uint64_t seed);

}  // namespace fairrank::sampler
