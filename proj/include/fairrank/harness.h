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
#include <string_view>
#include <vector>

#include "fairrank/ingest.h"
#include "fairrank/metrics.h"
#include "fairrank/sampler.h"
#include "fairrank/synthgen.h"
#include "fairrank/trainer.h"
#include "json.hpp"

namespace fairrank::harness {

// Bad command-line or config input; the CLI maps it to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Failure inside one pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

enum class Setting {
  kBaseline,
  kReal,
  kFake,
  kFakeByPop,
  kReg,
  kRealReg,
  kFakeReg,
  kFakeByPopReg,
};

std::string_view SettingName(Setting s);
Setting ParseSetting(std::string_view name);  // throws UsageError
bool Upsamples(Setting s);
bool Regularizes(Setting s);
sampler::Strategy StrategyOf(Setting s);  // requires Upsamples(s)
const std::vector<Setting>& AllSettings();

struct FileSource {
  std::filesystem::path ratings;
  std::filesystem::path providers;
  std::filesystem::path attributes;
  ingest::LoadOptions options;
};

struct ExperimentConfig {
  // Exactly one source.
  std::optional<synthgen::SynthConfig> synth;
  std::optional<FileSource> files;
  // Saved dataset directory (WriteDataset layout).
  std::optional<std::filesystem::path> dataset_dir;

  ingest::SplitSpec split;
  // Synthetic data designates class 0 as the minority; otherwise argmin.
  std::optional<AttributeClass> minority_class;

  Setting setting = Setting::kBaseline;
  std::optional<double> target_share;  // defaults to the catalog share
  double lambda = 0.0;                 // reg settings default to 1e-6
  trainer::TrainConfig train;
  std::int32_t triplets_per_observation = 10;
  std::int32_t k = 10;
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output_dir = "runs";

  // Applies setting-dependent defaults and checks invariants.
  void Validate() const;
  double EffectiveLambda() const;
};

nlohmann::json ToJson(const ExperimentConfig& config);
ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j);

// Loads a key=value config with [sections]; see README for the keys.
ExperimentConfig LoadConfigFile(const std::filesystem::path& path);
// Applies one "section.key=value" override.
void ApplyOverride(ExperimentConfig& config, std::string_view assignment);

struct RunResult {
  metrics::MetricsReport report;
  trainer::TrainLog log;
  std::filesystem::path run_dir;
  std::string dataset_id;  // content hash of the split this run evaluated
  std::uint64_t seed = 0;
  Setting setting = Setting::kBaseline;
  std::int64_t upsampled = 0;
  bool data_cache_hit = false;
  bool split_cache_hit = false;
};

// One seed: data -> split -> (upsample) -> triplets -> train -> rank ->
// metrics. Writes report.json, report.csv, train_log.csv, model.ckpt and
// manifest.json under output_dir/<setting>-seed<seed>. On failure the run
// directory is moved under output_dir/failed/ with an error.txt.
RunResult RunSingle(const ExperimentConfig& config, std::uint64_t seed);

// Every configured seed.
std::vector<RunResult> RunSetting(const ExperimentConfig& config);

// Re-executes a manifest written by RunSingle into output_dir.
RunResult RunFromManifest(const std::filesystem::path& manifest,
                          const std::filesystem::path& output_dir);

// Report file written next to every run: setting, seed, dataset id and the
// metrics with per-user arrays.
nlohmann::json RunReportJson(const RunResult& run);

struct LoadedRunReport {
  std::string setting;
  std::uint64_t seed = 0;
  std::string dataset_id;
  metrics::MetricsReport metrics;
};
LoadedRunReport LoadRunReport(const std::filesystem::path& path);

// One grid cell of the imbalance study.
struct ImbalanceCell {
  double catalog_target = 0.0;      // x
  double observation_target = 0.0;  // y
  double catalog_share = 0.0;       // realized C of the minority on train
  double interaction_share = 0.0;   // realized O of the minority on train
  double relevance_share = 0.0;
  double delta_relevance = 0.0;
  double delta_visibility = 0.0;
  double delta_exposure = 0.0;
  double ndcg = 0.0;
  std::string error;  // non-empty when the cell failed
};

struct ImbalanceSweep {
  std::vector<double> values;
  std::vector<ImbalanceCell> cells;  // SweepGrid order
};

// Baseline training on every (L_x, O_y) cell with x >= y. Cells run on a
// pool of `workers` threads (0 = hardware concurrency); each cell is single
// threaded. Writes cells.csv, three half-triangular heatmap CSVs and a
// gnuplot data file under output_dir/imbalance.
ImbalanceSweep RunImbalanceSweep(const std::vector<double>& values,
                                 const ExperimentConfig& base, std::int32_t workers = 0);

struct UpsampleRow {
  double share = 0.0;
  metrics::MetricsReport report;
  std::int64_t added = 0;
  bool best_exposure = false;  // argmin of delta_exposure over the sweep
  std::string error;
};

// Trains the given strategy at each target share (first configured seed).
// Writes tradeoff.csv under output_dir/upsample-<strategy>.
std::vector<UpsampleRow> RunUpsampleSweep(sampler::Strategy strategy,
                                          const std::vector<double>& shares,
                                          const ExperimentConfig& base);

struct MetricComparison {
  std::string metric;
  std::string reference;
  std::string candidate;
  double reference_value = 0.0;
  double candidate_value = 0.0;
  double delta = 0.0;  // candidate - reference
  std::optional<double> ci_low;
  std::optional<double> ci_high;
  bool significant = false;  // 95% interval excludes 0
};

struct ComparisonOptions {
  std::int32_t resamples = 1000;
  std::uint64_t seed = 2024;
};

// Compares every report against the first via a percentile bootstrap over
// users. Reports must share dataset id, seed and user count.
std::vector<MetricComparison> CompareSettings(
    const std::vector<LoadedRunReport>& reports, const ComparisonOptions& options = {});

void WriteComparisonCsv(const std::vector<MetricComparison>& rows,
                        const std::filesystem::path& path);

// Gnuplot script rendering the heatmap data written by RunImbalanceSweep.
std::string GnuplotHeatmapScript(const std::filesystem::path& data_file);

}  // namespace fairrank::harness
