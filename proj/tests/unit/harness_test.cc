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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fairrank/harness.h"
#include "fairrank/simd/kernels.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace fairrank::harness {
namespace {

namespace fs = std::filesystem;

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig Small(const fs::path& out) {
  ExperimentConfig c;
  synthgen::SynthConfig s;
  s.num_users = 100;
  s.num_items = 50;
  s.num_interactions = 1500;
  s.catalog_block = {0.5, 0.5};
  s.observation_block = {0.3, 0.7};
  s.popularity_scale = 5.0;
  s.seed = 3;
  c.synth = s;
  c.train.dim = 8;
  c.train.batch_size = 256;
  c.train.max_epochs = 3;
  c.triplets_per_observation = 2;
  c.output_dir = out;
  return c;
}

TEST(Settings, NamesRoundTrip) {
  for (Setting s : AllSettings()) EXPECT_EQ(ParseSetting(SettingName(s)), s);
  EXPECT_EQ(AllSettings().size(), 8u);
  EXPECT_THROW(ParseSetting("bogus"), UsageError);
  EXPECT_TRUE(Upsamples(Setting::kFakeByPopReg));
  EXPECT_TRUE(Regularizes(Setting::kRealReg));
  EXPECT_FALSE(Regularizes(Setting::kReal));
  EXPECT_EQ(StrategyOf(Setting::kFakeReg), sampler::Strategy::kFake);
}

TEST(Config, ValidateAndLambda) {
  ExperimentConfig c = Small("unused");
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.EffectiveLambda(), 0.0);
  c.setting = Setting::kReg;
  EXPECT_EQ(c.EffectiveLambda(), 1e-6);
  c.lambda = 0.3;
  EXPECT_EQ(c.EffectiveLambda(), 0.3);
  c.setting = Setting::kReal;
  EXPECT_EQ(c.EffectiveLambda(), 0.0);
  c.lambda = 1.5;
  EXPECT_THROW(c.Validate(), UsageError);
  c.lambda = 0.0;
  c.target_share = 1.0;
  EXPECT_THROW(c.Validate(), UsageError);
  c.target_share.reset();
  c.dataset_dir = "x";
  EXPECT_THROW(c.Validate(), UsageError);
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c = Small("out");
  c.setting = Setting::kFakeReg;
  c.target_share = 0.4;
  c.lambda = 0.25;
  c.seeds = {4, 9};
  c.minority_class = 1;
  const ExperimentConfig back = ExperimentConfigFromJson(ToJson(c));
  EXPECT_EQ(ToJson(back), ToJson(c));
  EXPECT_EQ(back.seeds, c.seeds);
  EXPECT_EQ(*back.target_share, 0.4);
}

TEST(Config, IniFileAndOverrides) {
  const fs::path dir = testing::TempDir("ini");
  std::ofstream(dir / "exp.ini") << "[data]\ncatalog_minority = 0.4\nobservation_minority = 0.2\n"
                                    "users = 120\n[experiment]\nsetting = real_reg\nlambda = 0.5\n"
                                    "seeds = 1, 2, 3\n[train]\ndim = 16\n";
  ExperimentConfig c = LoadConfigFile(dir / "exp.ini");
  ASSERT_TRUE(c.synth);
  EXPECT_EQ(c.synth->num_users, 120);
  EXPECT_DOUBLE_EQ(c.synth->catalog_block[0], 0.4);
  EXPECT_DOUBLE_EQ(c.synth->observation_block[0], 0.2);
  EXPECT_EQ(c.setting, Setting::kRealReg);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(c.train.dim, 16);
  ApplyOverride(c, "train.max_epochs=7");
  ApplyOverride(c, "experiment.k=5");
  EXPECT_EQ(c.train.max_epochs, 7);
  EXPECT_EQ(c.k, 5);
  EXPECT_THROW(ApplyOverride(c, "train.bogus=1"), UsageError);
  EXPECT_THROW(ApplyOverride(c, "nosection=1"), UsageError);
  EXPECT_THROW(ApplyOverride(c, "train.dim=abc"), UsageError);
  std::ofstream(dir / "bad.ini") << "[mystery]\nx = 1\n";
  EXPECT_THROW(LoadConfigFile(dir / "bad.ini"), UsageError);
}

metrics::MetricsReport FakeReport(std::vector<double> ndcg) {
  metrics::MetricsReport r;
  r.group_stats.catalog_repr = {0.3, 0.7};
  r.group_stats.interaction_repr = {0.2, 0.8};
  double sum = 0.0;
  for (double v : ndcg) sum += v;
  r.ndcg = sum / static_cast<double>(ndcg.size());
  r.user_ndcg = std::move(ndcg);
  r.user_relevance_share.assign(r.user_ndcg.size(), 0.25);
  r.user_visibility_share.assign(r.user_ndcg.size(), 0.2);
  r.user_exposure_share.assign(r.user_ndcg.size(), 0.1);
  r.delta_relevance = 0.05;
  r.delta_visibility = 0.1;
  r.delta_exposure = 0.2;
  r.cov_tot = 0.5;
  return r;
}

LoadedRunReport Loaded(std::string setting, metrics::MetricsReport m) {
  return {std::move(setting), 1, "ds", std::move(m)};
}

TEST(Compare, IdenticalReportsShowNoDifference) {
  const auto m = FakeReport({0.1, 0.5, 0.9, 0.3});
  const auto rows = CompareSettings({Loaded("baseline", m), Loaded("real", m)});
  ASSERT_FALSE(rows.empty());
  for (const auto& r : rows) {
    EXPECT_EQ(r.delta, 0.0) << r.metric;
    EXPECT_FALSE(r.significant) << r.metric;
  }
}

TEST(Compare, SingleUserDifference) {
  const auto ref = FakeReport({0.1, 0.5, 0.9, 0.3});
  const auto cand = FakeReport({0.1, 0.5, 0.9, 0.7});
  const auto rows = CompareSettings({Loaded("baseline", ref), Loaded("reg", cand)});
  const auto ndcg = std::find_if(rows.begin(), rows.end(),
                                 [](const MetricComparison& r) { return r.metric == "ndcg"; });
  ASSERT_NE(ndcg, rows.end());
  EXPECT_NEAR(ndcg->delta, 0.4 / 4.0, 1e-12);
  ASSERT_TRUE(ndcg->ci_low && ndcg->ci_high);
  EXPECT_GE(*ndcg->ci_low, 0.0);
  EXPECT_LE(*ndcg->ci_high, 0.4);
  EXPECT_EQ(ndcg->candidate, "reg");
}

TEST(Compare, MismatchesAreRejected) {
  const auto m = FakeReport({0.1, 0.5});
  LoadedRunReport other = Loaded("real", m);
  other.dataset_id = "other";
  EXPECT_THROW(CompareSettings({Loaded("baseline", m), other}), Error);
  other = Loaded("real", FakeReport({0.1, 0.5, 0.2}));
  EXPECT_THROW(CompareSettings({Loaded("baseline", m), other}), Error);
  EXPECT_THROW(CompareSettings({Loaded("baseline", m)}), UsageError);
}

TEST(Pipeline, DeterministicAndCached) {
  const fs::path out = testing::TempDir("pipeline");
  const ExperimentConfig c = Small(out);
  const RunResult a = RunSingle(c, 1);
  EXPECT_FALSE(a.data_cache_hit);
  const std::string first = Slurp(a.run_dir / "report.json");
  const RunResult b = RunSingle(c, 1);
  EXPECT_TRUE(b.data_cache_hit);
  EXPECT_TRUE(b.split_cache_hit);
  EXPECT_EQ(Slurp(b.run_dir / "report.json"), first);
  EXPECT_EQ(a.dataset_id, b.dataset_id);

  const fs::path fresh = testing::TempDir("pipeline_fresh");
  ExperimentConfig c2 = c;
  c2.output_dir = fresh;
  const RunResult d = RunSingle(c2, 1);
  EXPECT_FALSE(d.data_cache_hit);
  EXPECT_EQ(Slurp(d.run_dir / "report.json"), first);

  for (const char* f : {"report.json", "report.csv", "train_log.csv", "model.ckpt",
                        "manifest.json"}) {
    EXPECT_TRUE(fs::exists(a.run_dir / f)) << f;
  }
  const LoadedRunReport loaded = LoadRunReport(a.run_dir / "report.json");
  EXPECT_EQ(loaded.dataset_id, a.dataset_id);
  EXPECT_EQ(loaded.setting, "baseline");
  EXPECT_EQ(loaded.metrics.user_ndcg.size(), a.report.user_ndcg.size());
}

TEST(Pipeline, ManifestRerunIsBitExact) {
  const fs::path out = testing::TempDir("manifest");
  ExperimentConfig c = Small(out);
  c.setting = Setting::kRealReg;
  c.lambda = 0.5;
  const RunResult a = RunSingle(c, 2);
  const fs::path again = testing::TempDir("manifest_again");
  const RunResult b = RunFromManifest(a.run_dir / "manifest.json", again);
  EXPECT_EQ(Slurp(b.run_dir / "report.json"), Slurp(a.run_dir / "report.json"));
  EXPECT_EQ(Slurp(b.run_dir / "model.ckpt"), Slurp(a.run_dir / "model.ckpt"));
  EXPECT_GT(a.upsampled, 0);
}

TEST(Pipeline, SeedsAndSettingsDiffer) {
  const fs::path out = testing::TempDir("seeds");
  ExperimentConfig c = Small(out);
  c.seeds = {1, 2};
  const auto runs = RunSetting(c);
  ASSERT_EQ(runs.size(), 2u);
  EXPECT_NE(runs[0].run_dir, runs[1].run_dir);
  EXPECT_NE(runs[0].dataset_id, runs[1].dataset_id);
}

TEST(Pipeline, FailureMovesRunAside) {
  const fs::path out = testing::TempDir("failure");
  ExperimentConfig c = Small(out);
  c.synth.reset();
  c.dataset_dir = out / "does-not-exist";
  try {
    RunSingle(c, 1);
    FAIL() << "expected a stage error";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "data");
  }
  EXPECT_FALSE(fs::exists(out / "baseline-seed1"));
  EXPECT_TRUE(fs::exists(out / "failed" / "baseline-seed1" / "error.txt"));
}

TEST(Sweeps, SingleCellImbalanceGrid) {
  const fs::path out = testing::TempDir("imbalance");
  const ImbalanceSweep sweep = RunImbalanceSweep({0.5}, Small(out), 1);
  ASSERT_EQ(sweep.cells.size(), 1u);
  EXPECT_TRUE(sweep.cells[0].error.empty()) << sweep.cells[0].error;
  EXPECT_DOUBLE_EQ(sweep.cells[0].catalog_target, 0.5);
  EXPECT_NEAR(sweep.cells[0].catalog_share, 0.5, 0.05);
  EXPECT_TRUE(fs::exists(out / "imbalance" / "cells.csv"));
  EXPECT_TRUE(fs::exists(out / "imbalance" / "heatmap.dat"));
  EXPECT_THROW(RunImbalanceSweep({0.7}, Small(out), 1), UsageError);
}

TEST(Sweeps, SingleShareUpsample) {
  const fs::path out = testing::TempDir("upsweep");
  const auto rows = RunUpsampleSweep(sampler::Strategy::kReal, {0.6}, Small(out));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_TRUE(rows[0].error.empty()) << rows[0].error;
  EXPECT_TRUE(rows[0].best_exposure);
  EXPECT_GT(rows[0].added, 0);
  EXPECT_THROW(RunUpsampleSweep(sampler::Strategy::kReal, {0.6, 0.4}, Small(out)),
               UsageError);
}

TEST(Plot, ScriptNamesDataFile) {
  const std::string s = GnuplotHeatmapScript("grid/heatmap.dat");
  EXPECT_NE(s.find("grid/heatmap.dat"), std::string::npos);
}

}  // namespace
}  // namespace fairrank::harness
