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
#include <vector>

#include "fairrank/core.h"
#include "fairrank/synthgen.h"
#include "gtest/gtest.h"

namespace fairrank::synthgen {
namespace {

GroupStats Stats(const Dataset& d) {
  return ComputeGroupStats(d, BuildSensitiveRepresentation(d), 0);
}

TEST(Generate, CatalogShareAtLargeCatalog) {
  SynthConfig c;
  c.num_users = 3000;
  c.num_items = 3000;
  c.num_interactions = 30000;
  c.popularity_scale = 100.0;
  c.seed = 42;
  const Dataset d = Generate(c);
  EXPECT_NEAR(Stats(d).catalog_minority(), 0.5, 0.02);
}

TEST(Generate, ObservationShareTracksBlock) {
  const Dataset d = Generate(DeskScale(0.5, 0.1, 42));
  const GroupStats s = Stats(d);
  EXPECT_NEAR(s.interaction_minority(), 0.1, 0.02);
  EXPECT_NEAR(s.catalog_minority(), 0.5, 0.1);
  EXPECT_EQ(static_cast<std::int64_t>(d.interactions.size()), 120000);
  EXPECT_NO_THROW(d.Validate());
}

TEST(Generate, SingleProviderPerItem) {
  const Dataset d = Generate(DeskScale(0.3, 0.2, 5));
  EXPECT_EQ(d.num_providers(), d.num_items);
  for (const auto& providers : d.item_providers) EXPECT_EQ(providers.size(), 1u);
}

TEST(Generate, TinyScaleIsNearUniformWithinClass) {
  SynthConfig c;
  c.num_users = 2000;
  c.num_items = 100;
  c.num_interactions = 20000;
  c.popularity_scale = 0.0001;
  c.seed = 3;
  const Dataset d = Generate(c);
  const std::vector<std::int64_t> pop = ItemPopularity(d);
  for (AttributeClass a = 0; a < 2; ++a) {
    std::vector<std::int64_t> counts;
    for (ItemId i = 0; i < d.num_items; ++i) {
      if (d.provider_attribute[d.item_providers[i][0]] == a) counts.push_back(pop[i]);
    }
    ASSERT_GE(counts.size(), 10u);
    double total = 0.0;
    for (auto n : counts) total += static_cast<double>(n);
    const double expected = total / static_cast<double>(counts.size());
    double chi2 = 0.0;
    for (auto n : counts) chi2 += (n - expected) * (n - expected) / expected;
    // Wilson-Hilferty upper 1% point of chi-square with df degrees of freedom.
    const double df = static_cast<double>(counts.size() - 1);
    const double z = 2.326;
    const double critical = df * std::pow(1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df)), 3);
    EXPECT_LT(chi2, critical) << "class " << a;
  }
}

TEST(Generate, PopularityDecaysWithListPosition) {
  const Dataset d = Generate(DeskScale(0.5, 0.5, 9));
  const std::vector<std::int64_t> pop = ItemPopularity(d);
  for (AttributeClass a = 0; a < 2; ++a) {
    std::vector<std::int64_t> counts;
    for (ItemId i = 0; i < d.num_items; ++i) {
      if (d.provider_attribute[d.item_providers[i][0]] == a) counts.push_back(pop[i]);
    }
    // Head decile against tail decile.
    const std::size_t tenth = counts.size() / 10;
    std::int64_t head = 0, tail = 0;
    for (std::size_t j = 0; j < tenth; ++j) {
      head += counts[j];
      tail += counts[counts.size() - 1 - j];
    }
    EXPECT_GT(head, 5 * tail);
  }
}

TEST(Generate, Deterministic) {
  SynthConfig c;
  c.num_users = 100;
  c.num_items = 20;
  c.num_interactions = 400;
  c.popularity_scale = 1.0;
  c.seed = 123;
  EXPECT_EQ(Generate(c), Generate(c));
  SynthConfig other = c;
  other.seed = 124;
  EXPECT_NE(Generate(c).interactions, Generate(other).interactions);
}

TEST(Generate, NoDuplicatePairs) {
  SynthConfig c;
  c.num_users = 50;
  c.num_items = 20;
  c.num_interactions = 600;
  c.popularity_scale = 1.0;
  const Dataset d = Generate(c);
  std::vector<char> seen(50 * 20, 0);
  for (const Interaction& x : d.interactions) {
    char& s = seen[x.user * 20 + x.item];
    EXPECT_EQ(s, 0);
    s = 1;
  }
}

TEST(Generate, ErrorsOnEmptyClassWithMass) {
  SynthConfig c;
  c.num_users = 10;
  c.num_items = 5;
  c.num_interactions = 10;
  c.catalog_block = {0.0, 1.0};
  c.observation_block = {0.5, 0.5};
  EXPECT_THROW(Generate(c), Error);
}

TEST(Generate, ErrorsWhenPairsRunOut) {
  SynthConfig c;
  c.num_users = 10;
  c.num_items = 10;
  c.num_interactions = 100;
  c.popularity_scale = 100.0;  // concentrated head saturates first
  EXPECT_THROW(Generate(c), Error);
}

TEST(Validate, RejectsBadConfigs) {
  SynthConfig c;
  c.catalog_block = {0.7, 0.7};
  EXPECT_THROW(c.Validate(), ValidationError);
  c = SynthConfig{};
  c.popularity_scale = 0.0;
  EXPECT_THROW(c.Validate(), ValidationError);
  c = SynthConfig{};
  c.num_interactions = std::int64_t{c.num_users} * c.num_items + 1;
  EXPECT_THROW(c.Validate(), ValidationError);
}

TEST(SweepGrid, FifteenCells) {
  const auto grid = SweepGrid({0.1, 0.2, 0.3, 0.4, 0.5});
  EXPECT_EQ(grid.size(), 15u);
  for (const SynthConfig& c : grid) EXPECT_GE(c.catalog_block[0], c.observation_block[0]);
}

TEST(SweepGrid, SinglePoint) {
  const auto grid = SweepGrid({0.5});
  ASSERT_EQ(grid.size(), 1u);
  EXPECT_EQ(grid[0].catalog_block[0], 0.5);
  EXPECT_EQ(grid[0].observation_block[0], 0.5);
}

TEST(SweepGrid, EnumerationOracle) {
  const auto grid = SweepGrid({0.2, 0.4});
  std::vector<std::pair<double, double>> got;
  for (const SynthConfig& c : grid) got.push_back({c.catalog_block[0], c.observation_block[0]});
  std::sort(got.begin(), got.end());
  const std::vector<std::pair<double, double>> want = {{0.2, 0.2}, {0.4, 0.2}, {0.4, 0.4}};
  EXPECT_EQ(got, want);
  for (const SynthConfig& c : grid) {
    EXPECT_DOUBLE_EQ(c.catalog_block[0] + c.catalog_block[1], 1.0);
  }
}

TEST(SweepGrid, RejectsBadValues) {
  EXPECT_THROW(SweepGrid({}), ValidationError);
  EXPECT_THROW(SweepGrid({0.3, 0.2}), ValidationError);
  EXPECT_THROW(SweepGrid({0.6}), ValidationError);
}

TEST(Json, RoundTrip) {
  const SynthConfig c = DeskScale(0.3, 0.1, 77);
  const SynthConfig back = SynthConfigFromJson(ToJson(c));
  EXPECT_EQ(ToJson(back), ToJson(c));
}

}  // namespace
}  // namespace fairrank::synthgen
