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


#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairrank/harness.h"
#include "fairrank/ingest.h"
#include "fairrank/metrics.h"
#include "fairrank/ranking.h"
#include "fairrank/sampler.h"
#include "fairrank/synthgen.h"
#include "fairrank/trainer.h"
#include "fmt/format.h"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

namespace fs = std::filesystem;
using namespace fairrank;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

fs::path DefaultOutputRoot() {
  const char* root = std::getenv("FAIRRANK_OUTPUT_ROOT");
  return root != nullptr && *root != '\0' ? fs::path(root) : fs::path("runs");
}

// Options shared by every subcommand that runs the pipeline.
struct ExperimentFlags {
  std::string config_file;
  std::vector<std::string> overrides;
  std::string setting;
  std::string seeds;
  std::optional<double> lambda;
  std::optional<double> target;
  std::optional<double> catalog_minority;
  std::optional<double> observation_minority;
  std::string data_dir;
  bool full_scale = false;
  std::string output;

  void Register(CLI::App* app) {
    app->add_option("-c,--config", config_file, "INI config with [data] [split] "
                                                "[experiment] [train] sections");
    app->add_option("--set", overrides, "section.key=value override (repeatable)");
    app->add_option("--setting", setting, "baseline, real, fake, fake_by_pop, reg, "
                                          "real_reg, fake_reg or fake_by_pop_reg");
    app->add_option("--seeds", seeds, "comma-separated run seeds");
    app->add_option("--lambda", lambda, "regularizer weight");
    app->add_option("--target", target, "target minority interaction share");
    app->add_option("--catalog-minority", catalog_minority, "synthetic minority catalog share");
    app->add_option("--observation-minority", observation_minority,
                    "synthetic minority interaction share");
    app->add_option("--data", data_dir, "dataset directory written by synth or ingest");
    app->add_flag("--full-scale", full_scale, "full-size synthetic data (slow)");
    app->add_option("-o,--output", output, "output root (default $FAIRRANK_OUTPUT_ROOT or runs)");
  }

  harness::ExperimentConfig Build() const {
    harness::ExperimentConfig config;
    if (!config_file.empty()) {
      config = harness::LoadConfigFile(config_file);
      if (std::getenv("FAIRRANK_OUTPUT_ROOT") != nullptr && config.output_dir == "runs") {
        config.output_dir = DefaultOutputRoot();
      }
    } else {
      config.synth = synthgen::DeskScale(0.5, 0.5, 42);
      config.output_dir = DefaultOutputRoot();
    }
    for (const std::string& o : overrides) harness::ApplyOverride(config, o);
    if (catalog_minority) {
      harness::ApplyOverride(config, fmt::format("data.catalog_minority={}", *catalog_minority));
    }
    if (observation_minority) {
      harness::ApplyOverride(config,
                             fmt::format("data.observation_minority={}", *observation_minority));
    }
    if (full_scale) harness::ApplyOverride(config, "data.full_scale=true");
    if (!data_dir.empty()) harness::ApplyOverride(config, "data.dir=" + data_dir);
    if (!setting.empty()) config.setting = harness::ParseSetting(setting);
    if (!seeds.empty()) harness::ApplyOverride(config, "experiment.seeds=" + seeds);
    if (lambda) config.lambda = *lambda;
    if (target) config.target_share = *target;
    if (!output.empty()) config.output_dir = output;
    config.Validate();
    return config;
  }
};

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw harness::UsageError(fmt::format("bad number '{}'", token));
    }
  }
  if (values.empty()) throw harness::UsageError("empty value list");
  return values;
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << text;
}

void PrintRuns(const std::vector<harness::RunResult>& runs) {
  std::cout << "setting,seed,dataset_id,run_dir," << metrics::CsvHeader() << "\n";
  for (const harness::RunResult& r : runs) {
    std::cout << fmt::format("{},{},{},{},{}\n", harness::SettingName(r.setting), r.seed,
                             r.dataset_id, r.run_dir.string(), metrics::CsvRow(r.report));
  }
}

// report.json paths under each argument (files are taken as is).
std::vector<fs::path> FindReports(const std::vector<std::string>& inputs) {
  std::vector<fs::path> found;
  for (const std::string& input : inputs) {
    const fs::path p(input);
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::recursive_directory_iterator(p)) {
        const fs::path& f = entry.path();
        if (f.filename() == "report.json" &&
            f.string().find("/failed/") == std::string::npos) {
          found.push_back(f);
        }
      }
    } else if (fs::exists(p)) {
      found.push_back(p);
    } else {
      throw harness::UsageError(fmt::format("{} does not exist", input));
    }
  }
  std::sort(found.begin(), found.end());
  return found;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Provider-fairness experiments for pairwise matrix factorization"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off");

  // synth
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  double s_catalog = 0.5, s_observation = 0.5;
  std::uint64_t s_seed = 42;
  bool s_full = false;
  std::optional<double> s_scale;
  std::string s_out;
  synth->add_option("--catalog-minority", s_catalog, "minority share of the catalog");
  synth->add_option("--observation-minority", s_observation,
                    "minority share of interactions");
  synth->add_option("--seed", s_seed);
  synth->add_option("--popularity-scale", s_scale, "in-class popularity decay");
  synth->add_flag("--full-scale", s_full, "30000 users, 3000 items, 1.2M interactions");
  synth->add_option("-o,--out", s_out, "dataset directory")->required();

  // ingest
  CLI::App* ingest_cmd = app.add_subcommand("ingest", "load ratings and provider metadata");
  std::string i_ratings, i_providers, i_attributes, i_out, i_split;
  double i_threshold = 3.0;
  bool i_equal = false;
  std::int32_t i_cardinality = 0;
  std::uint64_t i_split_seed = 11;
  ingest_cmd->add_option("--ratings", i_ratings)->required();
  ingest_cmd->add_option("--providers", i_providers)->required();
  ingest_cmd->add_option("--attributes", i_attributes)->required();
  ingest_cmd->add_option("--threshold", i_threshold);
  ingest_cmd->add_flag("--equal", i_equal, "keep ratings equal to the threshold only");
  ingest_cmd->add_option("--cardinality", i_cardinality, "attribute classes (0 infers)");
  ingest_cmd->add_option("--split", i_split, "also write temporal or random splits")
      ->check(CLI::IsMember({"temporal", "random"}));
  ingest_cmd->add_option("--split-seed", i_split_seed);
  ingest_cmd->add_option("-o,--out", i_out, "dataset directory")->required();

  // upsample
  CLI::App* upsample = app.add_subcommand("upsample", "add minority interactions to a dataset");
  std::string u_data, u_strategy = "real", u_out;
  std::optional<double> u_target;
  std::optional<AttributeClass> u_minority;
  std::uint64_t u_seed = 7;
  upsample->add_option("--data", u_data, "dataset directory")->required();
  upsample->add_option("--strategy", u_strategy, "real, fake or fake_by_pop");
  upsample->add_option("--target", u_target, "target share (default: catalog share)");
  upsample->add_option("--minority", u_minority, "minority class (default: argmin catalog)");
  upsample->add_option("--seed", u_seed);
  upsample->add_option("-o,--out", u_out, "output dataset directory")->required();

  // train
  CLI::App* train = app.add_subcommand("train", "run one setting end to end for each seed");
  ExperimentFlags t_flags;
  t_flags.Register(train);
  std::string t_manifest;
  train->add_option("--manifest", t_manifest, "re-run a manifest.json bit-exactly");

  // evaluate
  CLI::App* evaluate = app.add_subcommand("evaluate", "score a checkpoint on held-out data");
  std::string e_model, e_train, e_test, e_out;
  std::vector<std::string> e_exclude;
  std::int32_t e_k = 10;
  std::optional<AttributeClass> e_minority;
  evaluate->add_option("--model", e_model, "model.ckpt")->required();
  evaluate->add_option("--train", e_train, "train dataset directory")->required();
  evaluate->add_option("--test", e_test, "held-out dataset directory")->required();
  evaluate->add_option("--exclude", e_exclude, "further datasets whose items are not ranked");
  evaluate->add_option("--minority", e_minority, "minority class (default: argmin catalog)");
  evaluate->add_option("-k", e_k);
  evaluate->add_option("-o,--out", e_out, "report.json path");

  // sweep-imbalance
  CLI::App* sweep_imb =
      app.add_subcommand("sweep-imbalance", "baseline over the catalog/interaction grid");
  ExperimentFlags si_flags;
  si_flags.Register(sweep_imb);
  std::string si_values = "0.1,0.2,0.3,0.4,0.5";
  std::int32_t si_workers = 0;
  sweep_imb->add_option("--values", si_values, "minority fractions, ascending");
  sweep_imb->add_option("--workers", si_workers, "worker threads (0 = all cores)");

  // sweep-upsample
  CLI::App* sweep_up = app.add_subcommand("sweep-upsample", "trade-off over target shares");
  ExperimentFlags su_flags;
  su_flags.Register(sweep_up);
  std::string su_strategy = "real", su_shares;
  sweep_up->add_option("--strategy", su_strategy, "real, fake or fake_by_pop");
  sweep_up->add_option("--shares", su_shares, "ascending target shares")->required();

  // compare
  CLI::App* compare = app.add_subcommand("compare", "bootstrap deltas against the first report");
  std::vector<std::string> c_reports;
  std::string c_out;
  harness::ComparisonOptions c_options;
  compare->add_option("reports", c_reports, "report.json files, reference first")
      ->required()
      ->expected(2, -1);
  compare->add_option("--resamples", c_options.resamples);
  compare->add_option("--seed", c_options.seed);
  compare->add_option("-o,--out", c_out, "comparison CSV (default: stdout)");

  // report
  CLI::App* report = app.add_subcommand("report", "collect run reports into one table");
  std::vector<std::string> r_inputs;
  std::string r_out, r_gnuplot, r_script;
  report->add_option("inputs", r_inputs, "report.json files or directories");
  report->add_option("-o,--out", r_out, "summary CSV (default: stdout)");
  report->add_option("--heatmap", r_gnuplot, "heatmap.dat to render");
  report->add_option("--script", r_script, "gnuplot script path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("fairrank"));
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*synth) {
      synthgen::SynthConfig config = s_full
                                         ? synthgen::FullScale(s_catalog, s_observation, s_seed)
                                         : synthgen::DeskScale(s_catalog, s_observation, s_seed);
      if (s_full) spdlog::warn("full scale selected: generation takes far longer");
      if (s_scale) config.popularity_scale = *s_scale;
      try {
        config.Validate();
      } catch (const ValidationError& e) {
        throw harness::UsageError(e.what());
      }
      const Dataset dataset = synthgen::Generate(config);
      ingest::WriteDataset(dataset, s_out);
      WriteFile(fs::path(s_out) / "synth.json", synthgen::ToJson(config).dump(2) + "\n");
      std::cout << fmt::format("wrote {} interactions to {}\n", dataset.interactions.size(),
                               s_out);
    } else if (*ingest_cmd) {
      ingest::LoadOptions options;
      options.threshold = i_threshold;
      options.mode = i_equal ? ingest::ThresholdMode::kEqual : ingest::ThresholdMode::kAtLeast;
      options.attribute_cardinality = i_cardinality;
      const ingest::LoadedDataset loaded =
          ingest::LoadDataset(i_ratings, i_providers, i_attributes, options);
      ingest::WriteDataset(loaded.dataset, i_out);
      ingest::WriteKeyMaps(i_out, loaded.keys);
      std::cout << fmt::format(
          "{} interactions, {} users, {} items; dropped {} items ({} rows), {} duplicates, "
          "{} below threshold\n",
          loaded.dataset.interactions.size(), loaded.dataset.num_users,
          loaded.dataset.num_items, loaded.dropped_items, loaded.dropped_rows,
          loaded.duplicate_rows, loaded.below_threshold);
      if (!i_split.empty()) {
        ingest::SplitSpec spec;
        spec.mode = i_split == "temporal" ? ingest::SplitMode::kTemporal
                                          : ingest::SplitMode::kRandom;
        spec.seed = i_split_seed;
        const ingest::Splits splits = ingest::Split(loaded.dataset, spec);
        ingest::WriteDataset(splits.train, fs::path(i_out) / "train");
        ingest::WriteDataset(splits.validation, fs::path(i_out) / "validation");
        ingest::WriteDataset(splits.test, fs::path(i_out) / "test");
      }
    } else if (*upsample) {
      const Dataset dataset = ingest::ReadDataset(u_data);
      const Representations reprs = BuildSensitiveRepresentation(dataset);
      const GroupStats stats = ComputeGroupStats(dataset, reprs, u_minority);
      sampler::UpsampleConfig config;
      try {
        config.strategy = sampler::ParseStrategy(u_strategy);
      } catch (const Error& e) {
        throw harness::UsageError(e.what());
      }
      config.target_share = u_target;
      config.seed = u_seed;
      const sampler::UpsampleResult result = sampler::Upsample(dataset, reprs, stats, config);
      ingest::WriteDataset(result.dataset, u_out);
      std::cout << fmt::format("added {} rows (planned {}); minority share {:.6f} -> {:.6f}, "
                               "target {:.6f}{}\n",
                               result.added, result.planned, result.share_before,
                               result.share_after, result.target,
                               result.capped ? " (capped)" : "");
    } else if (*train) {
      if (!t_manifest.empty()) {
        const fs::path out = t_flags.output.empty() ? DefaultOutputRoot() : fs::path(t_flags.output);
        PrintRuns({harness::RunFromManifest(t_manifest, out)});
      } else {
        PrintRuns(harness::RunSetting(t_flags.Build()));
      }
    } else if (*evaluate) {
      const trainer::Checkpoint ckpt = trainer::LoadCheckpoint(e_model);
      const Dataset train_data = ingest::ReadDataset(e_train);
      const Dataset test_data = ingest::ReadDataset(e_test);
      const Representations reprs = BuildSensitiveRepresentation(train_data);
      const GroupStats stats = ComputeGroupStats(train_data, reprs, e_minority);
      std::vector<std::vector<ItemId>> seen = ItemsByUser(train_data);
      for (const std::string& dir : e_exclude) {
        const std::vector<std::vector<ItemId>> more = ItemsByUser(ingest::ReadDataset(dir));
        for (std::size_t u = 0; u < seen.size() && u < more.size(); ++u) {
          seen[u].insert(seen[u].end(), more[u].begin(), more[u].end());
          std::sort(seen[u].begin(), seen[u].end());
          seen[u].erase(std::unique(seen[u].begin(), seen[u].end()), seen[u].end());
        }
      }
      const RankedLists lists = RankTopK(ckpt.model, e_k, seen);
      const metrics::MetricsReport result =
          metrics::Evaluate(lists, reprs, stats, metrics::GroundTruth(test_data));
      const std::string text = metrics::ToJson(result, true).dump(2) + "\n";
      if (e_out.empty()) {
        std::cout << metrics::CsvHeader() << "\n" << metrics::CsvRow(result) << "\n";
      } else {
        WriteFile(e_out, text);
      }
    } else if (*sweep_imb) {
      const harness::ImbalanceSweep sweep =
          harness::RunImbalanceSweep(ParseList(si_values), si_flags.Build(), si_workers);
      std::cout << "catalog_target,observation_target,relevance_share,delta_relevance,"
                   "delta_visibility,delta_exposure,ndcg,error\n";
      for (const harness::ImbalanceCell& c : sweep.cells) {
        std::cout << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{}\n",
                                 c.catalog_target, c.observation_target, c.relevance_share,
                                 c.delta_relevance, c.delta_visibility, c.delta_exposure,
                                 c.ndcg, c.error);
      }
      const bool failed = std::any_of(sweep.cells.begin(), sweep.cells.end(),
                                      [](const auto& c) { return !c.error.empty(); });
      if (failed) return kExitFailure;
    } else if (*sweep_up) {
      sampler::Strategy strategy;
      try {
        strategy = sampler::ParseStrategy(su_strategy);
      } catch (const Error& e) {
        throw harness::UsageError(e.what());
      }
      const std::vector<harness::UpsampleRow> rows =
          harness::RunUpsampleSweep(strategy, ParseList(su_shares), su_flags.Build());
      std::cout << "share,added,ndcg,delta_relevance,delta_visibility,delta_exposure,"
                   "best_exposure,error\n";
      bool failed = false;
      for (const harness::UpsampleRow& r : rows) {
        failed = failed || !r.error.empty();
        std::cout << fmt::format("{},{},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n", r.share, r.added,
                                 r.report.ndcg, r.report.delta_relevance,
                                 r.report.delta_visibility, r.report.delta_exposure,
                                 r.best_exposure ? 1 : 0, r.error);
      }
      if (failed) return kExitFailure;
    } else if (*compare) {
      std::vector<harness::LoadedRunReport> reports;
      for (const std::string& path : c_reports) reports.push_back(harness::LoadRunReport(path));
      const std::vector<harness::MetricComparison> rows =
          harness::CompareSettings(reports, c_options);
      const fs::path out = c_out.empty() ? fs::path("/dev/stdout") : fs::path(c_out);
      harness::WriteComparisonCsv(rows, out);
    } else if (*report) {
      if (!r_gnuplot.empty()) {
        const std::string script = harness::GnuplotHeatmapScript(r_gnuplot);
        if (r_script.empty()) {
          std::cout << script;
        } else {
          WriteFile(r_script, script);
        }
      }
      if (!r_inputs.empty()) {
        std::string table = "setting,seed,dataset_id,path," + metrics::CsvHeader() + "\n";
        for (const fs::path& path : FindReports(r_inputs)) {
          const harness::LoadedRunReport r = harness::LoadRunReport(path);
          table += fmt::format("{},{},{},{},{}\n", r.setting, r.seed, r.dataset_id,
                               path.string(), metrics::CsvRow(r.metrics));
        }
        if (r_out.empty()) {
          std::cout << table;
        } else {
          WriteFile(r_out, table);
        }
      }
      if (r_gnuplot.empty() && r_inputs.empty()) {
        throw harness::UsageError("report needs inputs or --heatmap");
      }
    }
  } catch (const harness::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return 0;
}
