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
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "fairrank/ingest.h"
#include "fairrank/metrics.h"
#include "fairrank/ranking.h"
#include "fairrank/rng.h"
#include "fairrank/sampler.h"
#include "fairrank/synthgen.h"
#include "fairrank/trainer.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace fairrank::trainer {
namespace {

// Gradient entry for one parameter, zero for untouched rows.
double GradientAt(const SparseGradient& grad, bool user, std::int32_t row, std::int32_t f) {
  const auto& touched = user ? grad.touched_users() : grad.touched_items();
  if (std::find(touched.begin(), touched.end(), row) == touched.end()) return 0.0;
  return user ? grad.UserRow(row)[f] : grad.ItemRow(row)[f];
}

std::vector<Triplet> RandomBatch(Rng& rng, std::int32_t users, std::int32_t items,
                                 std::size_t n) {
  std::vector<Triplet> batch;
  while (batch.size() < n) {
    const UserId u = static_cast<UserId>(rng.UniformInt(users));
    const ItemId i = static_cast<ItemId>(rng.UniformInt(items));
    const ItemId j = static_cast<ItemId>(rng.UniformInt(items));
    if (i != j) batch.push_back({u, i, j});
  }
  return batch;
}

RegularizerTarget RandomTarget(Rng& rng, std::int32_t items) {
  RegularizerTarget t;
  for (std::int32_t i = 0; i < items; ++i) {
    t.minority_share.push_back(rng.Uniform() < 0.3 ? 0.0 : rng.Uniform());
  }
  t.catalog_minority = 0.3;
  return t;
}

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

TEST(PairwiseLoss, ZeroMarginIsLn2) {
  FactorModel model(3, 4, 2);
  std::vector<Triplet> batch = {{0, 1, 2}, {1, 0, 3}, {2, 3, 1}};
  EXPECT_NEAR(PairwiseLoss(model, batch, 0.0), std::log(2.0), 1e-15);
}

TEST(PairwiseLoss, LargeMarginVanishes) {
  FactorModel model(1, 2, 1);
  model.user_factors = {1.0};
  model.item_factors = {100.0, -100.0};
  std::vector<Triplet> batch = {{0, 0, 1}};
  EXPECT_LT(PairwiseLoss(model, batch, 0.0), 1e-80);
  EXPECT_TRUE(std::isfinite(PairwiseLoss(model, {{{0, 1, 0}}}, 0.0)));
}

TEST(PairwiseLoss, MatchesStraightLineOracle) {
  Rng rng(12);
  const FactorModel model = testing::RandomModel(rng, 6, 9, 5);
  const std::vector<Triplet> batch = RandomBatch(rng, 6, 9, 8);
  const double l2 = 0.01;
  double loss = 0.0;
  std::set<UserId> users;
  std::set<ItemId> items;
  for (const Triplet& t : batch) {
    double margin = 0.0;
    for (int f = 0; f < 5; ++f) {
      margin += model.user_factors[t.user * 5 + f] *
                (model.item_factors[t.positive * 5 + f] - model.item_factors[t.negative * 5 + f]);
    }
    loss += -std::log(Sigmoid(margin));
    users.insert(t.user);
    items.insert(t.positive);
    items.insert(t.negative);
  }
  loss /= static_cast<double>(batch.size());
  double norm = 0.0;
  for (UserId u : users) {
    for (int f = 0; f < 5; ++f) norm += std::pow(model.user_factors[u * 5 + f], 2);
  }
  for (ItemId i : items) {
    for (int f = 0; f < 5; ++f) norm += std::pow(model.item_factors[i * 5 + f], 2);
  }
  EXPECT_NEAR(PairwiseLoss(model, batch, l2), loss + l2 * norm, 1e-10);
}

TEST(FairnessRegularizer, PerfectAlignmentIsZero) {
  Rng rng(1);
  const FactorModel model = testing::RandomModel(rng, 2, 3, 2, 0.1, 1.0);
  RegularizerTarget t;
  t.minority_share = {1.0, 1.0, 1.0};
  t.catalog_minority = 1.0;
  EXPECT_EQ(FairnessRegularizer(model, {{{0, 1, 2}, {1, 0, 2}}}, t).value, 0.0);
}

TEST(FairnessRegularizer, SquaredGap) {
  FactorModel model(1, 2, 1);
  model.user_factors = {1.0};
  model.item_factors = {2.0, 5.0};
  RegularizerTarget t;
  t.minority_share = {0.029, 0.0};
  t.catalog_minority = 0.060;
  const RegularizerValue v = FairnessRegularizer(model, {{{0, 0, 1}}}, t);
  EXPECT_NEAR(v.value, 0.031 * 0.031, 1e-15);
  EXPECT_NEAR(v.value, 9.6e-4, 1e-5);
}

TEST(FairnessRegularizer, DegenerateDenominator) {
  FactorModel model(1, 2, 1);
  RegularizerTarget t;
  t.minority_share = {0.5, 0.5};
  t.catalog_minority = 0.2;
  const RegularizerValue v = FairnessRegularizer(model, {{{0, 0, 1}}}, t);
  EXPECT_TRUE(v.degenerate);
  EXPECT_EQ(v.value, 0.0);
}

TEST(TotalLoss, ConvexCombination) {
  Rng rng(4);
  const FactorModel model = testing::RandomModel(rng, 4, 6, 3, 0.0, 1.0);
  const auto batch = RandomBatch(rng, 4, 6, 10);
  const RegularizerTarget t = RandomTarget(rng, 6);
  const LossBreakdown b = TotalLoss(model, batch, t, 0.25, 1e-3);
  EXPECT_NEAR(b.pairwise, PairwiseLoss(model, batch, 1e-3), 1e-15);
  EXPECT_NEAR(b.regularizer, FairnessRegularizer(model, batch, t).value, 1e-15);
  EXPECT_NEAR(b.total, 0.75 * b.pairwise + 0.25 * b.regularizer, 1e-15);
}

TEST(Gradient, MatchesCentralDifferences) {
  for (double lambda : {0.0, 0.5, 1.0}) {
    Rng rng(100 + static_cast<std::uint64_t>(lambda * 10));
    FactorModel model = testing::RandomModel(rng, 5, 6, 4, 0.0, 1.0);
    const auto batch = RandomBatch(rng, 5, 6, 12);
    const RegularizerTarget t = RandomTarget(rng, 6);
    const double l2 = 1e-2;
    SparseGradient grad;
    grad.Reset(5, 6, 4);
    const LossBreakdown at = ComputeGradient(model, batch, t, lambda, l2, grad);
    EXPECT_NEAR(at.total, TotalLoss(model, batch, t, lambda, l2).total, 1e-14);
    const double h = 1e-5;
    for (int trial = 0; trial < 50; ++trial) {
      const bool user = rng.Uniform() < 0.5;
      const std::int32_t row = static_cast<std::int32_t>(rng.UniformInt(user ? 5 : 6));
      const std::int32_t f = static_cast<std::int32_t>(rng.UniformInt(4));
      double& p = user ? model.user_factors[row * 4 + f] : model.item_factors[row * 4 + f];
      const double saved = p;
      p = saved + h;
      const double up = TotalLoss(model, batch, t, lambda, l2).total;
      p = saved - h;
      const double down = TotalLoss(model, batch, t, lambda, l2).total;
      p = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = GradientAt(grad, user, row, f);
      const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
      EXPECT_LT(std::abs(numeric - analytic) / scale, 1e-3)
          << "lambda=" << lambda << (user ? " user " : " item ") << row << "," << f
          << " numeric " << numeric << " analytic " << analytic;
    }
  }
}

TEST(Adam, LazyUpdateTouchesOnlyGradientRows) {
  Rng rng(6);
  FactorModel model = testing::RandomModel(rng, 4, 5, 3);
  const FactorModel before = model;
  TrainConfig config;
  config.learning_rate = 0.1;
  AdamOptimizer adam(model, config);
  SparseGradient grad;
  grad.Reset(4, 5, 3);
  auto g = grad.User(2);
  g[0] = 0.5;
  g[1] = -0.25;
  g[2] = 0.0;
  adam.Apply(model, grad);
  EXPECT_EQ(adam.steps(), 1);
  for (UserId u = 0; u < 4; ++u) {
    for (int f = 0; f < 3; ++f) {
      const double b = before.user_factors[u * 3 + f];
      const double a = model.user_factors[u * 3 + f];
      if (u != 2) {
        EXPECT_EQ(a, b);
        continue;
      }
      const double gv = f == 0 ? 0.5 : (f == 1 ? -0.25 : 0.0);
      // Step 1 with bias correction: m_hat = g, v_hat = g^2.
      const double expected = b - 0.1 * gv / (std::abs(gv) + 1e-8);
      EXPECT_NEAR(a, expected, 1e-12);
    }
  }
  EXPECT_EQ(model.item_factors, before.item_factors);
}

TEST(Config, ValidateAndJson) {
  TrainConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.lambda = 1.5;
  EXPECT_THROW(c.Validate(), ValidationError);
  c = TrainConfig{};
  c.batch_size = 0;
  EXPECT_THROW(c.Validate(), ValidationError);
  c = TrainConfig{};
  c.lambda = 1e-6;
  c.dim = 7;
  const TrainConfig back = TrainConfigFromJson(ToJson(c));
  EXPECT_EQ(back.Hash(), c.Hash());
  EXPECT_NE(TrainConfig{}.Hash(), c.Hash());
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Rng rng(8);
  Checkpoint ckpt{testing::RandomModel(rng, 7, 11, 5), 99, "abc"};
  ckpt.model.user_factors[3] = 1e-310;  // subnormal survives too
  const auto dir = testing::TempDir("ckpt");
  SaveCheckpoint(dir / "m.ckpt", ckpt);
  const Checkpoint back = LoadCheckpoint(dir / "m.ckpt");
  EXPECT_EQ(back.model, ckpt.model);
  EXPECT_EQ(back.seed, 99u);
  EXPECT_EQ(back.config_hash, "abc");
  const RankedLists a = RankTopK(ckpt.model, 5, {});
  const RankedLists b = RankTopK(back.model, 5, {});
  for (std::size_t u = 0; u < a.lists.size(); ++u) EXPECT_EQ(a.lists[u], b.lists[u]);
}

TEST(Checkpoint, RejectsForeignFiles) {
  const auto dir = testing::TempDir("ckpt_bad");
  std::ofstream(dir / "junk") << "not a checkpoint at all";
  EXPECT_THROW(LoadCheckpoint(dir / "junk"), Error);
  EXPECT_THROW(LoadCheckpoint(dir / "missing"), Error);
}

struct SmallProblem {
  ingest::Splits splits;
  Representations reprs;
  GroupStats stats;
  sampler::TripletSet triplets;
};

SmallProblem MakeProblem(double catalog, double observation, std::int32_t users = 3000,
                         std::int32_t items = 300, std::int64_t rows = 120000) {
  synthgen::SynthConfig sc = synthgen::DeskScale(catalog, observation, 42);
  sc.num_users = users;
  sc.num_items = items;
  sc.num_interactions = rows;
  SmallProblem p;
  ingest::SplitSpec spec;
  spec.mode = ingest::SplitMode::kRandom;
  p.splits = ingest::Split(synthgen::Generate(sc), spec);
  p.reprs = BuildSensitiveRepresentation(p.splits.train);
  p.stats = ComputeGroupStats(p.splits.train, p.reprs, 0);
  p.triplets = sampler::BuildTriplets(p.splits.train, 10, 3);
  return p;
}

TEST(Train, DeterministicForFixedSeed) {
  const SmallProblem p = MakeProblem(0.5, 0.5, 300, 60, 6000);
  TrainConfig c;
  c.dim = 8;
  c.max_epochs = 3;
  c.lambda = 0.1;
  const TrainResult a = Train(p.splits.train, p.splits.validation, p.triplets, c, p.reprs, p.stats);
  const TrainResult b = Train(p.splits.train, p.splits.validation, p.triplets, c, p.reprs, p.stats);
  EXPECT_EQ(a.model, b.model);
  ASSERT_EQ(a.log.epochs.size(), b.log.epochs.size());
  for (std::size_t e = 0; e < a.log.epochs.size(); ++e) {
    EXPECT_EQ(a.log.epochs[e].train_loss, b.log.epochs[e].train_loss);
  }
}

TEST(Train, TinyLambdaIsContinuousWithZero) {
  const SmallProblem p = MakeProblem(0.5, 0.3, 300, 60, 6000);
  TrainConfig c;
  c.dim = 8;
  c.max_epochs = 1;
  const TrainResult zero =
      Train(p.splits.train, p.splits.validation, p.triplets, c, p.reprs, p.stats);
  c.lambda = 1e-30;
  const TrainResult tiny =
      Train(p.splits.train, p.splits.validation, p.triplets, c, p.reprs, p.stats);
  double worst = 0.0;
  for (std::size_t i = 0; i < zero.model.user_factors.size(); ++i) {
    worst = std::max(worst, std::abs(zero.model.user_factors[i] - tiny.model.user_factors[i]));
  }
  for (std::size_t i = 0; i < zero.model.item_factors.size(); ++i) {
    worst = std::max(worst, std::abs(zero.model.item_factors[i] - tiny.model.item_factors[i]));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST(Train, ValidationNdcgImprovesOverInit) {
  const SmallProblem p = MakeProblem(0.5, 0.5);
  TrainConfig c;
  c.max_epochs = 5;
  c.patience = 100;
  const TrainResult r = Train(p.splits.train, p.splits.validation, p.triplets, c, p.reprs, p.stats);
  const FactorModel init = InitModel(p.splits.train.num_users, p.splits.train.num_items, c);
  const RankedLists lists = RankTopK(init, c.eval_k, ItemsByUser(p.splits.train));
  const double untrained =
      metrics::NdcgAtK(lists, metrics::GroundTruth(p.splits.validation), c.eval_k).value;
  ASSERT_EQ(r.log.epochs.size(), 5u);
  EXPECT_GT(r.log.epochs[4].val_ndcg, untrained);
}

TEST(Train, FullRegularizationShrinksValidationDisparity) {
  const SmallProblem p = MakeProblem(0.5, 0.1);
  TrainConfig c;
  c.lambda = 1.0;
  c.max_epochs = 3;
  c.patience = 100;
  const TrainResult r = Train(p.splits.train, p.splits.validation, p.triplets, c, p.reprs, p.stats);
  ASSERT_EQ(r.log.epochs.size(), 3u);
  EXPECT_LT(r.log.epochs[1].val_delta_relevance, r.log.epochs[0].val_delta_relevance);
  EXPECT_LT(r.log.epochs[2].val_delta_relevance, r.log.epochs[1].val_delta_relevance);
}

TEST(Train, DivergenceDumpsLastGoodModel) {
  const SmallProblem p = MakeProblem(0.5, 0.5, 200, 40, 3000);
  const auto dir = testing::TempDir("diverge");
  TrainConfig c;
  c.dim = 4;
  c.max_epochs = 2;
  c.init_low = 1e200;
  c.init_high = 1e201;
  c.divergence_checkpoint = dir / "last.ckpt";
  EXPECT_THROW(Train(p.splits.train, p.splits.validation, p.triplets, c, p.reprs, p.stats),
               DivergenceError);
  EXPECT_TRUE(std::filesystem::exists(dir / "last.ckpt"));
}

TEST(Train, WithoutValidationKeepsLastEpoch) {
  const SmallProblem p = MakeProblem(0.5, 0.5, 200, 40, 3000);
  TrainConfig c;
  c.dim = 4;
  c.max_epochs = 2;
  const TrainResult r =
      Train(p.splits.train, p.splits.validation.EmptyCopy(), p.triplets, c, p.reprs, p.stats);
  EXPECT_EQ(r.log.best_epoch, 2);
  EXPECT_TRUE(std::isnan(r.log.epochs[0].val_ndcg));
}

}  // namespace
}  // namespace fairrank::trainer
