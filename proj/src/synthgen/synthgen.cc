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

#include "fairrank/synthgen.h"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <unordered_set>

#include "fairrank/rng.h"

namespace fairrank::synthgen {
namespace {

// Scale for a 3000-item catalog. Larger values concentrate each class on
// fewer head items; beyond about 25 (desk) the majority head of the
// (0.5, 0.1) cell saturates under the no-repetition rule and 120k unique
// pairs cannot be placed.
constexpr double kReferencePopularityScale = 100.0;

void CheckBlock(const std::vector<double>& block, const char* name) {
  if (block.empty()) throw ValidationError(fmt::format("{} is empty", name));
  double sum = 0.0;
  for (double p : block) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError(fmt::format("{} entry {} outside [0, 1]", name, p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ValidationError(fmt::format("{} sums to {}, not 1", name, sum));
  }
}

SynthConfig Scaled(double x, double y, std::uint64_t seed, std::int32_t users,
                   std::int32_t items, std::int64_t interactions) {
  SynthConfig c;
  c.num_users = users;
  c.num_items = items;
  c.num_interactions = interactions;
  c.catalog_block = {x, 1.0 - x};
  c.observation_block = {y, 1.0 - y};
  c.popularity_scale = kReferencePopularityScale * (static_cast<double>(items) / 3000.0);
  c.seed = seed;
  return c;
}

}  // namespace

void SynthConfig::Validate() const {
  if (num_users <= 0 || num_items <= 0) {
    throw ValidationError("synthetic dataset needs users and items");
  }
  if (num_interactions < 0) throw ValidationError("negative interaction count");
  CheckBlock(catalog_block, "catalog_block");
  CheckBlock(observation_block, "observation_block");
  if (catalog_block.size() != observation_block.size()) {
    throw ValidationError("catalog and observation blocks differ in size");
  }
  if (num_interactions >
      static_cast<std::int64_t>(num_users) * static_cast<std::int64_t>(num_items)) {
    throw ValidationError(fmt::format(
        "{} interactions exceed the {}x{} unique pairs", num_interactions,
        num_users, num_items));
  }
  if (!(popularity_scale > 0.0)) {
    throw ValidationError("popularity_scale must be positive");
  }
}

SynthConfig DeskScale(double x, double y, std::uint64_t seed) {
  return Scaled(x, y, seed, 3000, 300, 120000);
}

SynthConfig FullScale(double x, double y, std::uint64_t seed) {
  return Scaled(x, y, seed, 30000, 3000, 1200000);
}

Dataset Generate(const SynthConfig& config) {
  config.Validate();
  Rng rng(config.seed);
  const auto classes = static_cast<std::int32_t>(config.catalog_block.size());

  Dataset ds;
  ds.num_users = config.num_users;
  ds.num_items = config.num_items;
  ds.attribute_cardinality = classes;
  ds.item_providers.resize(config.num_items);
  ds.provider_attribute.resize(config.num_items);

  const WeightedSampler catalog(config.catalog_block);
  std::vector<std::vector<ItemId>> class_items(classes);
  for (ItemId i = 0; i < config.num_items; ++i) {
    const auto a = static_cast<AttributeClass>(catalog.Sample(rng));
    ds.item_providers[i] = {i};
    ds.provider_attribute[i] = a;
    class_items[a].push_back(i);
  }
  for (std::int32_t a = 0; a < classes; ++a) {
    if (class_items[a].empty() && config.observation_block[a] > 0.0) {
      throw ValidationError(fmt::format(
          "class {} has no items but observation mass {}", a,
          config.observation_block[a]));
    }
  }

  const WeightedSampler observation(config.observation_block);
  std::unordered_set<std::int64_t> seen;
  seen.reserve(static_cast<std::size_t>(config.num_interactions) * 2);
  ds.interactions.reserve(config.num_interactions);
  const std::int64_t max_draws = 50 * config.num_interactions;
  std::int64_t draws = 0;
  // The class is drawn once per interaction. Duplicates redraw user and item
  // inside that class.
  while (static_cast<std::int64_t>(ds.interactions.size()) <
         config.num_interactions) {
    const auto a = observation.Sample(rng);
    const auto& items = class_items[a];
    const double scale = static_cast<double>(items.size()) / config.popularity_scale;
    for (;;) {
      if (draws++ >= max_draws) {
        throw Error(fmt::format(
            "placed only {} of {} unique interactions within {} draws",
            ds.interactions.size(), config.num_interactions, max_draws));
      }
      const auto u = static_cast<UserId>(rng.UniformInt(config.num_users));
      const double pos = std::round(std::abs(rng.Exponential(scale)));
      const auto idx =
          static_cast<std::size_t>(std::fmod(pos, static_cast<double>(items.size())));
      const ItemId i = items[idx];
      const std::int64_t key = static_cast<std::int64_t>(u) * config.num_items + i;
      if (!seen.insert(key).second) continue;
      ds.interactions.push_back({u, i, 1.0, std::nullopt, Provenance::kBase});
      break;
    }
  }
  return ds;
}

std::vector<SynthConfig> SweepGrid(const std::vector<double>& values,
                                   const SynthConfig& base) {
  if (values.empty()) throw ValidationError("empty sweep grid");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0.0 && values[k] <= 0.5)) {
      throw ValidationError(fmt::format("grid value {} outside (0, 0.5]", values[k]));
    }
    if (k > 0 && values[k] <= values[k - 1]) {
      throw ValidationError("grid values must be strictly ascending");
    }
  }
  std::vector<SynthConfig> out;
  for (double x : values) {
    for (double y : values) {
      if (y > x) break;
      SynthConfig c = base;
      c.catalog_block = {x, 1.0 - x};
      c.observation_block = {y, 1.0 - y};
      out.push_back(c);
    }
  }
  return out;
}

nlohmann::json ToJson(const SynthConfig& c) {
  return {{"num_users", c.num_users},
          {"num_items", c.num_items},
          {"num_interactions", c.num_interactions},
          {"catalog_block", c.catalog_block},
          {"observation_block", c.observation_block},
          {"popularity_scale", c.popularity_scale},
          {"seed", c.seed}};
}

SynthConfig SynthConfigFromJson(const nlohmann::json& j) {
  SynthConfig c;
  c.num_users = j.at("num_users").get<std::int32_t>();
  c.num_items = j.at("num_items").get<std::int32_t>();
  c.num_interactions = j.at("num_interactions").get<std::int64_t>();
  c.catalog_block = j.at("catalog_block").get<std::vector<double>>();
  c.observation_block = j.at("observation_block").get<std::vector<double>>();
  c.popularity_scale = j.at("popularity_scale").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

}  // namespace fairrank::synthgen
