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
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>
#include <thread>

#include "fairrank/harness.h"
#include "fairrank/hash.h"
#include "fairrank/ranking.h"
#include "fairrank/simd/kernels.h"
#include "fmt/format.h"
#include "spdlog/spdlog.h"

namespace fairrank::harness {
namespace fs = std::filesystem;
namespace {

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t run, std::string_view stage) {
  return ContentHasher().Update(base).Update(run).Update(stage).digest();
}

void HashFile(ContentHasher& hasher, const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read {}", path.string()));
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  hasher.Update(static_cast<std::uint64_t>(bytes.size())).Update(bytes);
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw Error(fmt::format("short write to {}", path.string()));
}

nlohmann::json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot read {}", path.string()));
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()), 0);
  }
}

// Builds into a temporary directory and renames it into place so a cache
// entry is either complete or absent.
template <typename Build>
void Publish(const fs::path& dir, Build&& build) {
  fs::path tmp = dir;
  tmp += fmt::format(".tmp{}", std::hash<std::thread::id>{}(std::this_thread::get_id()));
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  build(tmp);
  std::error_code ec;
  fs::rename(tmp, dir, ec);
  if (ec) {
    fs::remove_all(tmp);
    if (!fs::exists(dir)) throw Error(fmt::format("cannot publish {}", dir.string()));
  }
}

struct DataStage {
  Dataset dataset;
  std::string hash;
  bool cache_hit = false;
};

DataStage LoadData(const ExperimentConfig& config, std::uint64_t seed, const fs::path& cache) {
  ContentHasher hasher;
  std::optional<synthgen::SynthConfig> synth;
  if (config.synth) {
    synth = *config.synth;
    synth->seed = DeriveSeed(config.synth->seed, seed, "data");
    hasher.Update("synth").Update(synthgen::ToJson(*synth).dump());
  } else if (config.files) {
    hasher.Update("files");
    HashFile(hasher, config.files->ratings);
    HashFile(hasher, config.files->providers);
    HashFile(hasher, config.files->attributes);
    const ingest::LoadOptions& o = config.files->options;
    hasher.Update(o.threshold)
        .Update(static_cast<std::uint64_t>(o.mode))
        .Update(static_cast<std::uint64_t>(o.attribute_cardinality));
  } else {
    hasher.Update("dataset");
    for (const char* name : {"interactions.csv", "providers.csv", "attributes.csv", "dataset.json"}) {
      HashFile(hasher, *config.dataset_dir / name);
    }
  }
  DataStage stage;
  stage.hash = hasher.hex();
  const fs::path dir = cache / ("data-" + stage.hash);
  if (fs::exists(dir)) {
    stage.dataset = ingest::ReadDataset(dir);
    stage.cache_hit = true;
    return stage;
  }
  std::optional<ingest::KeyMaps> keys;
  if (synth) {
    stage.dataset = synthgen::Generate(*synth);
  } else if (config.files) {
    ingest::LoadedDataset loaded = ingest::LoadDataset(
        config.files->ratings, config.files->providers, config.files->attributes,
        config.files->options);
    stage.dataset = std::move(loaded.dataset);
    keys = std::move(loaded.keys);
  } else {
    stage.dataset = ingest::ReadDataset(*config.dataset_dir);
  }
  Publish(dir, [&](const fs::path& tmp) {
    ingest::WriteDataset(stage.dataset, tmp);
    if (keys) ingest::WriteKeyMaps(tmp, *keys);
  });
  return stage;
}

ingest::SplitSpec EffectiveSplit(const ExperimentConfig& config, std::uint64_t seed) {
  ingest::SplitSpec spec = config.split;
  // Generated data has no timestamps.
  if (config.synth) spec.mode = ingest::SplitMode::kRandom;
  spec.seed = DeriveSeed(config.split.seed, seed, "split");
  return spec;
}

struct SplitStage {
  ingest::Splits splits;
  std::string hash;
  bool cache_hit = false;
};

SplitStage LoadSplit(const DataStage& data, const ingest::SplitSpec& spec, const fs::path& cache) {
  SplitStage stage;
  stage.hash = ContentHasher()
                   .Update(data.hash)
                   .Update(static_cast<std::uint64_t>(spec.mode))
                   .Update(spec.train)
                   .Update(spec.validation)
                   .Update(spec.test)
                   .Update(spec.seed)
                   .Update(static_cast<std::uint64_t>(spec.min_history))
                   .hex();
  const fs::path dir = cache / ("split-" + stage.hash);
  if (fs::exists(dir)) {
    stage.splits.train = ingest::ReadDataset(dir / "train");
    stage.splits.validation = ingest::ReadDataset(dir / "validation");
    stage.splits.test = ingest::ReadDataset(dir / "test");
    stage.cache_hit = true;
    return stage;
  }
  stage.splits = ingest::Split(data.dataset, spec);
  Publish(dir, [&](const fs::path& tmp) {
    ingest::WriteDataset(stage.splits.train, tmp / "train");
    ingest::WriteDataset(stage.splits.validation, tmp / "validation");
    ingest::WriteDataset(stage.splits.test, tmp / "test");
  });
  return stage;
}

// Base train and validation items per user, sorted.
std::vector<std::vector<ItemId>> SeenItems(const Dataset& train, const Dataset& validation) {
  std::vector<std::vector<ItemId>> seen = ItemsByUser(train);
  const std::vector<std::vector<ItemId>> val = ItemsByUser(validation);
  for (std::size_t u = 0; u < seen.size(); ++u) {
    std::vector<ItemId> merged;
    std::set_union(seen[u].begin(), seen[u].end(), val[u].begin(), val[u].end(),
                   std::back_inserter(merged));
    seen[u] = std::move(merged);
  }
  return seen;
}

std::string RunName(Setting setting, std::uint64_t seed) {
  return fmt::format("{}-seed{}", SettingName(setting), seed);
}

void MoveToFailed(const ExperimentConfig& config, const fs::path& run_dir,
                  const std::string& stage, const std::string& what) {
  std::error_code ec;
  fs::create_directories(run_dir, ec);
  std::ofstream(run_dir / "error.txt") << stage << ": " << what << "\n";
  const fs::path failed = config.output_dir / "failed" / run_dir.filename();
  fs::create_directories(failed.parent_path(), ec);
  fs::remove_all(failed, ec);
  fs::rename(run_dir, failed, ec);
  spdlog::error("run {} failed in stage {}: {}; artifacts kept under {}",
                run_dir.filename().string(), stage, what, failed.string());
}

}  // namespace

nlohmann::json RunReportJson(const RunResult& run) {
  return {{"setting", std::string(SettingName(run.setting))},
          {"seed", run.seed},
          {"dataset_id", run.dataset_id},
          {"upsampled", run.upsampled},
          {"metrics", metrics::ToJson(run.report, true)}};
}

LoadedRunReport LoadRunReport(const fs::path& path) {
  const nlohmann::json j = ReadJson(path);
  LoadedRunReport r;
  try {
    r.setting = j.at("setting").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.dataset_id = j.at("dataset_id").get<std::string>();
    r.metrics = metrics::ReportFromJson(j.at("metrics"));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()), 0);
  }
  return r;
}

RunResult RunSingle(const ExperimentConfig& config, std::uint64_t seed) {
  config.Validate();
  const fs::path cache = config.output_dir / "cache";
  const fs::path run_dir = config.output_dir / RunName(config.setting, seed);
  std::string stage = "setup";
  try {
    fs::remove_all(run_dir);
    fs::create_directories(run_dir);
    fs::create_directories(cache);

    RunResult result;
    result.run_dir = run_dir;
    result.seed = seed;
    result.setting = config.setting;

    stage = "data";
    const DataStage data = LoadData(config, seed, cache);
    result.data_cache_hit = data.cache_hit;

    stage = "split";
    const SplitStage split = LoadSplit(data, EffectiveSplit(config, seed), cache);
    result.split_cache_hit = split.cache_hit;
    result.dataset_id = split.hash;
    const ingest::Splits& parts = split.splits;

    const Representations reprs = BuildSensitiveRepresentation(parts.train);
    std::optional<AttributeClass> minority = config.minority_class;
    if (!minority && config.synth) minority = 0;
    const GroupStats stats = ComputeGroupStats(parts.train, reprs, minority);

    Dataset fitted = parts.train;
    if (Upsamples(config.setting)) {
      stage = "upsample";
      sampler::UpsampleConfig up;
      up.strategy = StrategyOf(config.setting);
      up.target_share = config.target_share;
      up.seed = DeriveSeed(up.seed, seed, "upsample");
      sampler::UpsampleResult upsampled = sampler::Upsample(parts.train, reprs, stats, up);
      result.upsampled = upsampled.added;
      fitted = std::move(upsampled.dataset);
      spdlog::info("{}: added {} rows, minority interaction share {:.4f} -> {:.4f}",
                   run_dir.filename().string(), upsampled.added, upsampled.share_before,
                   upsampled.share_after);
    }

    stage = "triplets";
    const sampler::TripletSet triplets = sampler::BuildTriplets(
        fitted, config.triplets_per_observation, DeriveSeed(0, seed, "triplets"));

    stage = "train";
    trainer::TrainConfig tc = config.train;
    tc.lambda = config.EffectiveLambda();
    tc.seed = DeriveSeed(config.train.seed, seed, "init");
    tc.divergence_checkpoint = run_dir / "diverged.ckpt";
    trainer::TrainResult trained =
        trainer::Train(parts.train, parts.validation, triplets, tc, reprs, stats);
    result.log = std::move(trained.log);

    stage = "evaluate";
    const RankedLists lists =
        RankTopK(trained.model, config.k, SeenItems(parts.train, parts.validation));
    result.report = metrics::Evaluate(lists, reprs, stats, metrics::GroundTruth(parts.test));

    stage = "write";
    const nlohmann::json report_json = RunReportJson(result);
    WriteText(run_dir / "report.json", report_json.dump(2) + "\n");
    WriteText(run_dir / "report.csv",
              fmt::format("setting,seed,dataset_id,{}\n{},{},{},{}\n", metrics::CsvHeader(),
                          SettingName(config.setting), seed, result.dataset_id,
                          metrics::CsvRow(result.report)));
    result.log.WriteCsv(run_dir / "train_log.csv");
    trainer::SaveCheckpoint(run_dir / "model.ckpt", {trained.model, tc.seed, tc.Hash()});

    ExperimentConfig pinned = config;
    pinned.seeds = {seed};
    const nlohmann::json config_json = ToJson(pinned);
    const nlohmann::json manifest = {
        {"config", config_json},
        {"seed", seed},
        {"config_hash", HashHex(config_json.dump())},
        {"data_hash", data.hash},
        {"dataset_id", result.dataset_id},
        {"kernel", std::string(simd::ActiveKernels().name)},
        {"report_hash", HashHex(report_json.dump())}};
    WriteText(run_dir / "manifest.json", manifest.dump(2) + "\n");
    return result;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    MoveToFailed(config, run_dir, stage, e.what());
    throw StageError(stage, e.what());
  }
}

std::vector<RunResult> RunSetting(const ExperimentConfig& config) {
  config.Validate();
  std::vector<RunResult> runs;
  for (std::uint64_t seed : config.seeds) runs.push_back(RunSingle(config, seed));
  return runs;
}

RunResult RunFromManifest(const fs::path& manifest_path, const fs::path& output_dir) {
  const nlohmann::json manifest = ReadJson(manifest_path);
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::string kernel;
  try {
    config = ExperimentConfigFromJson(manifest.at("config"));
    seed = manifest.at("seed").get<std::uint64_t>();
    kernel = manifest.at("kernel").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: {}", manifest_path.string(), e.what()), 0);
  }
  config.output_dir = output_dir;
  const simd::KernelTable* table = simd::KernelsByName(kernel);
  if (table == nullptr) {
    throw Error(fmt::format("manifest needs kernel '{}', unavailable on this machine", kernel));
  }
  const simd::KernelTable* previous = &simd::ActiveKernels();
  simd::OverrideKernels(table);
  try {
    RunResult result = RunSingle(config, seed);
    simd::OverrideKernels(previous);
    return result;
  } catch (...) {
    simd::OverrideKernels(previous);
    throw;
  }
}

}  // namespace fairrank::harness
