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
#include <set>
#include <utility>
#include <vector>

#include "fairrank/core.h"
#include "fairrank/rng.h"
#include "fairrank/sampler.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace fairrank::sampler {
namespace {

using testing::CatalogDataset;

double MinorityShare(const Dataset& d, AttributeClass minority) {
  return InteractionMass(d, BuildSensitiveRepresentation(d), minority) /
         static_cast<double>(d.interactions.size());
}

// Random two-class instance where the minority is under-observed.
Dataset SkewedDataset(Rng& rng, std::int32_t users, std::int32_t items) {
  Dataset d = testing::RandomDataset(rng, users, items, 2, 0, 2);
  const auto reprs = BuildSensitiveRepresentation(d);
  std::set<std::pair<UserId, ItemId>> seen;
  const std::int64_t rows = std::int64_t{users} * items / 4;
  while (static_cast<std::int64_t>(d.interactions.size()) < rows) {
    const UserId u = static_cast<UserId>(rng.UniformInt(users));
    const ItemId i = static_cast<ItemId>(rng.UniformInt(items));
    // Keep minority-heavy items rarer.
    if (reprs[i].share[0] > 0.0 && rng.Uniform() < 0.7) continue;
    if (!seen.insert({u, i}).second) continue;
    d.interactions.push_back({u, i});
  }
  return d;
}

void ExpectNoDuplicatePairs(const Dataset& d) {
  std::set<std::pair<UserId, ItemId>> pairs;
  for (const Interaction& x : d.interactions) {
    EXPECT_TRUE(pairs.insert({x.user, x.item}).second)
        << "duplicate pair (" << x.user << ", " << x.item << ")";
  }
}

TEST(Upsample, ReachesTargetForEveryStrategy) {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const Dataset d = SkewedDataset(rng, 60, 40);
    const auto reprs = BuildSensitiveRepresentation(d);
    const GroupStats stats = ComputeGroupStats(d, reprs, 0);
    const double share = stats.interaction_minority();
    for (Strategy s : {Strategy::kReal, Strategy::kFake, Strategy::kFakeByPop}) {
      UpsampleConfig config;
      config.strategy = s;
      config.target_share = share + 0.05;
      config.seed = 100 + trial;
      const UpsampleResult r = Upsample(d, reprs, stats, config);
      EXPECT_NEAR(MinorityShare(r.dataset, 0), *config.target_share, 0.005)
          << StrategyName(s);
      EXPECT_NEAR(r.share_after, MinorityShare(r.dataset, 0), 1e-12);
      EXPECT_EQ(r.added, static_cast<std::int64_t>(r.dataset.interactions.size()) -
                             static_cast<std::int64_t>(d.interactions.size()));
      EXPECT_TRUE(std::equal(d.interactions.begin(), d.interactions.end(),
                             r.dataset.interactions.begin()));
      for (std::size_t j = d.interactions.size(); j < r.dataset.interactions.size(); ++j) {
        const Interaction& x = r.dataset.interactions[j];
        EXPECT_EQ(x.provenance, ProvenanceFor(s));
        EXPECT_GT(reprs[x.item].share[0], 0.0);
      }
      if (s != Strategy::kReal) ExpectNoDuplicatePairs(r.dataset);
    }
  }
}

TEST(Upsample, RealDuplicatesExistingPairs) {
  Rng rng(7);
  const Dataset d = SkewedDataset(rng, 40, 30);
  const auto reprs = BuildSensitiveRepresentation(d);
  const GroupStats stats = ComputeGroupStats(d, reprs, 0);
  std::set<std::pair<UserId, ItemId>> base;
  for (const Interaction& x : d.interactions) base.insert({x.user, x.item});
  UpsampleConfig config;
  config.target_share = stats.interaction_minority() + 0.1;
  const UpsampleResult r = Upsample(d, reprs, stats, config);
  ASSERT_GT(r.added, 0);
  for (std::size_t j = d.interactions.size(); j < r.dataset.interactions.size(); ++j) {
    const Interaction& x = r.dataset.interactions[j];
    EXPECT_EQ(base.count({x.user, x.item}), 1u);
  }
}

TEST(Upsample, TargetAtCurrentShareIsNoOp) {
  Rng rng(3);
  const Dataset d = SkewedDataset(rng, 30, 20);
  const auto reprs = BuildSensitiveRepresentation(d);
  const GroupStats stats = ComputeGroupStats(d, reprs, 0);
  UpsampleConfig config;
  config.target_share = stats.interaction_minority();
  const UpsampleResult r = Upsample(d, reprs, stats, config);
  EXPECT_EQ(r.added, 0);
  EXPECT_EQ(r.dataset, d);
}

TEST(Upsample, FakeToyDoublingMinorityMass) {
  // 5 users, 4 items; items 0 and 1 are minority.
  Dataset d = CatalogDataset({{0}, {0}, {1}, {1}}, 5);
  d.interactions = {{0, 0}, {1, 2}, {2, 2}, {2, 3}, {3, 3}, {4, 2}, {0, 3}, {1, 3}};
  const auto reprs = BuildSensitiveRepresentation(d);
  const GroupStats stats = ComputeGroupStats(d, reprs, 0);
  const double mass = InteractionMass(d, reprs, 0);
  const double rows = static_cast<double>(d.interactions.size());
  // Two minority rows more: (mass + 2) / (rows + 2).
  UpsampleConfig config;
  config.strategy = Strategy::kFake;
  config.target_share = (2.0 * mass) / (rows + mass);
  const UpsampleResult r = Upsample(d, reprs, stats, config);
  EXPECT_GE(InteractionMass(r.dataset, reprs, 0), 2.0 * mass);
  std::set<std::pair<UserId, ItemId>> base;
  for (const Interaction& x : d.interactions) base.insert({x.user, x.item});
  for (std::size_t j = d.interactions.size(); j < r.dataset.interactions.size(); ++j) {
    const Interaction& x = r.dataset.interactions[j];
    EXPECT_EQ(base.count({x.user, x.item}), 0u);
    EXPECT_LT(x.item, 2);
  }
  ExpectNoDuplicatePairs(r.dataset);
}

TEST(Upsample, FakeExhaustionIsAnError) {
  Dataset d = CatalogDataset({{0}, {1}}, 2);
  d.interactions = {{0, 1}, {1, 1}, {0, 0}};
  const auto reprs = BuildSensitiveRepresentation(d);
  const GroupStats stats = ComputeGroupStats(d, reprs, 0);
  UpsampleConfig config;
  config.strategy = Strategy::kFake;
  config.target_share = 0.9;
  EXPECT_THROW(Upsample(d, reprs, stats, config), Error);
}

TEST(Upsample, RejectsTargetsBelowCurrentOrOutOfRange) {
  Rng rng(5);
  const Dataset d = SkewedDataset(rng, 30, 20);
  const auto reprs = BuildSensitiveRepresentation(d);
  const GroupStats stats = ComputeGroupStats(d, reprs, 0);
  UpsampleConfig config;
  config.target_share = stats.interaction_minority() / 2.0;
  EXPECT_THROW(Upsample(d, reprs, stats, config), ValidationError);
  config.target_share = 1.0;
  EXPECT_THROW(Upsample(d, reprs, stats, config), ValidationError);
}

TEST(Upsample, MaxAddedCaps) {
  Rng rng(5);
  const Dataset d = SkewedDataset(rng, 30, 20);
  const auto reprs = BuildSensitiveRepresentation(d);
  const GroupStats stats = ComputeGroupStats(d, reprs, 0);
  UpsampleConfig config;
  config.target_share = stats.interaction_minority() + 0.2;
  config.max_added = 3;
  const UpsampleResult r = Upsample(d, reprs, stats, config);
  EXPECT_EQ(r.added, 3);
  EXPECT_TRUE(r.capped);
}

TEST(Upsample, Deterministic) {
  Rng rng(5);
  const Dataset d = SkewedDataset(rng, 30, 20);
  const auto reprs = BuildSensitiveRepresentation(d);
  const GroupStats stats = ComputeGroupStats(d, reprs, 0);
  UpsampleConfig config;
  config.strategy = Strategy::kFakeByPop;
  config.target_share = stats.interaction_minority() + 0.05;
  EXPECT_EQ(Upsample(d, reprs, stats, config).dataset, Upsample(d, reprs, stats, config).dataset);
}

TEST(Strategy, NamesRoundTrip) {
  for (Strategy s : {Strategy::kReal, Strategy::kFake, Strategy::kFakeByPop}) {
    EXPECT_EQ(ParseStrategy(StrategyName(s)), s);
  }
  EXPECT_EQ(ParseStrategy("fake-by-pop"), Strategy::kFakeByPop);
  EXPECT_THROW(ParseStrategy("other"), Error);
}

TEST(Triplets, CountsAndNegatives) {
  Dataset d = CatalogDataset({{0}, {1}, {0}, {1}, {1}}, 1);
  d.interactions = {{0, 1}, {0, 3}};
  const TripletSet t = BuildTriplets(d, 10, 1);
  ASSERT_EQ(t.size(), 20u);
  for (const Triplet& x : t.triplets) {
    EXPECT_EQ(x.user, 0);
    EXPECT_TRUE(x.positive == 1 || x.positive == 3);
    EXPECT_TRUE(x.negative == 0 || x.negative == 2 || x.negative == 4);
  }
}

TEST(Triplets, DuplicatedRowsDoubleTheirTriplets) {
  Dataset d = CatalogDataset({{0}, {1}, {0}, {1}}, 2);
  d.interactions = {{0, 1}, {1, 0}};
  Interaction dup{0, 1};
  dup.provenance = Provenance::kReal;
  d.interactions.push_back(dup);
  const TripletSet t = BuildTriplets(d, 10, 2);
  const auto n = std::count_if(t.triplets.begin(), t.triplets.end(),
                               [](const Triplet& x) { return x.user == 0 && x.positive == 1; });
  EXPECT_EQ(n, 20);
  const auto tagged = std::count(t.provenance.begin(), t.provenance.end(), Provenance::kReal);
  EXPECT_EQ(tagged, 10);
}

TEST(Triplets, NegativesAvoidPositivesForDenseUsers) {
  Rng rng(9);
  Dataset d = testing::RandomDataset(rng, 5, 12, 2, 0);
  for (ItemId i = 0; i < 10; ++i) d.interactions.push_back({0, i});
  d.interactions.push_back({1, 4});
  const TripletSet t = BuildTriplets(d, 7, 3);
  for (const Triplet& x : t.triplets) {
    if (x.user == 0) {
      EXPECT_GE(x.negative, 10);
    }
    if (x.user == 1) {
      EXPECT_NE(x.negative, 4);
    }
  }
}

TEST(Triplets, UsersWhoSawEverythingAreSkipped) {
  Dataset d = CatalogDataset({{0}, {1}}, 2);
  d.interactions = {{0, 0}, {0, 1}, {1, 0}};
  const TripletSet t = BuildTriplets(d, 3, 4);
  EXPECT_EQ(t.skipped_users, 1);
  EXPECT_EQ(t.size(), 3u);
}

TEST(Triplets, Deterministic) {
  Rng rng(10);
  const Dataset d = testing::RandomDataset(rng, 20, 30, 2, 150);
  const TripletSet a = BuildTriplets(d, 5, 42);
  const TripletSet b = BuildTriplets(d, 5, 42);
  EXPECT_EQ(a.triplets, b.triplets);
  EXPECT_EQ(a.provenance, b.provenance);
}

}  // namespace
}  // namespace fairrank::sampler
