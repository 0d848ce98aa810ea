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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fairrank/core.h"

namespace fairrank::ingest {

struct RawRating {
  std::string user;
  std::string item;
  double rating = 0.0;
  std::optional<std::int64_t> timestamp;
  Provenance provenance = Provenance::kBase;
};

// user,item,rating[,timestamp[,provenance]] with comma or tab delimiters and
// an optional header row.
std::vector<RawRating> ReadRatings(const std::filesystem::path& path);

enum class ThresholdMode { kAtLeast, kEqual };

struct LoadOptions {
  double threshold = 3.0;
  ThresholdMode mode = ThresholdMode::kAtLeast;
  // 0 infers max class + 1 (at least 2).
  std::int32_t attribute_cardinality = 0;
};

struct KeyMaps {
  std::vector<std::string> users;
  std::vector<std::string> items;
  std::vector<std::string> providers;
};

struct LoadedDataset {
  Dataset dataset;
  KeyMaps keys;
  std::int64_t dropped_items = 0;        // no labeled provider
  std::int64_t dropped_rows = 0;         // rating rows on dropped/unknown items
  std::int64_t duplicate_rows = 0;       // superseded (user, item) ratings
  std::int64_t below_threshold = 0;
};

// Binarizes ratings, keeps items with at least one labeled provider and
// densifies keys in first-appearance order.
LoadedDataset LoadDataset(const std::filesystem::path& ratings,
                          const std::filesystem::path& providers,
                          const std::filesystem::path& attributes,
                          const LoadOptions& options);

// Key map files user_keys.csv, item_keys.csv and provider_keys.csv as
// index,key rows.
void WriteKeyMaps(const std::filesystem::path& dir, const KeyMaps& keys);

enum class SplitMode { kTemporal, kRandom };

struct SplitSpec {
  SplitMode mode = SplitMode::kTemporal;
  double train = 0.7;
  double validation = 0.1;
  double test = 0.2;
  std::uint64_t seed = 11;
  std::int32_t min_history = 5;

  void Validate() const;
};

struct Splits {
  Dataset train;
  Dataset validation;
  Dataset test;
};

// Per user: test and validation sizes are floored, the remainder trains.
// Temporal mode orders each user's rows oldest first (stable on ties); users
// below min_history stay entirely in train.
Splits Split(const Dataset& dataset, const SplitSpec& spec);

// Project dataset layout: interactions.csv, providers.csv, attributes.csv and
// dataset.json with the entity counts.
void WriteDataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset ReadDataset(const std::filesystem::path& dir);

}  // namespace fairrank::ingest
