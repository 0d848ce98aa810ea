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
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>

#include "fairrank/harness.h"
#include "fmt/format.h"
#include "spdlog/spdlog.h"

namespace fairrank::harness {
namespace fs = std::filesystem;
namespace {

// Runs job(i) for i in [0, count) on at most `workers` threads.
template <typename Job>
void ParallelFor(std::size_t count, std::int32_t workers, Job&& job) {
  std::size_t threads = workers > 0 ? static_cast<std::size_t>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  if (threads <= 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(loop);
}

std::ofstream OpenCsv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  return out;
}

std::string Cell(double v) { return std::isnan(v) ? std::string() : fmt::format("{:.17g}", v); }

std::string Optional(const std::optional<double>& v) {
  return v ? fmt::format("{:.17g}", *v) : std::string();
}

Setting SettingFor(sampler::Strategy strategy, bool regularized) {
  switch (strategy) {
    case sampler::Strategy::kReal:
      return regularized ? Setting::kRealReg : Setting::kReal;
    case sampler::Strategy::kFake:
      return regularized ? Setting::kFakeReg : Setting::kFake;
    case sampler::Strategy::kFakeByPop:
      return regularized ? Setting::kFakeByPopReg : Setting::kFakeByPop;
  }
  throw Error("unknown strategy");
}

void WriteMatrix(const fs::path& path, const ImbalanceSweep& sweep,
                 double ImbalanceCell::*field) {
  std::ofstream out = OpenCsv(path);
  out << "catalog_minority";
  for (double y : sweep.values) out << fmt::format(",{}", y);
  out << "\n";
  for (double x : sweep.values) {
    out << x;
    for (double y : sweep.values) {
      out << ",";
      for (const ImbalanceCell& c : sweep.cells) {
        if (c.catalog_target == x && c.observation_target == y && c.error.empty()) {
          out << Cell(c.*field);
        }
      }
    }
    out << "\n";
  }
}

}  // namespace

ImbalanceSweep RunImbalanceSweep(const std::vector<double>& values,
                                 const ExperimentConfig& base, std::int32_t workers) {
  const synthgen::SynthConfig synth_base =
      base.synth ? *base.synth : synthgen::DeskScale(0.5, 0.5, 42);
  std::vector<synthgen::SynthConfig> grid;
  try {
    grid = synthgen::SweepGrid(values, synth_base);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  ImbalanceSweep sweep;
  sweep.values = values;
  std::sort(sweep.values.begin(), sweep.values.end());
  sweep.cells.resize(grid.size());
  const fs::path out_dir = base.output_dir / "imbalance";
  fs::create_directories(out_dir);

  ParallelFor(grid.size(), workers, [&](std::size_t i) {
    ImbalanceCell& cell = sweep.cells[i];
    cell.catalog_target = grid[i].catalog_block[0];
    cell.observation_target = grid[i].observation_block[0];
    ExperimentConfig config = base;
    config.synth = grid[i];
    config.files.reset();
    config.dataset_dir.reset();
    config.setting = Setting::kBaseline;
    config.seeds = {base.seeds.front()};
    config.output_dir =
        out_dir / fmt::format("cell-{}-{}", cell.catalog_target, cell.observation_target);
    try {
      const RunResult run = RunSingle(config, config.seeds.front());
      cell.catalog_share = run.report.group_stats.catalog_minority();
      cell.interaction_share = run.report.group_stats.interaction_minority();
      cell.relevance_share = run.report.minority_relevance_share;
      cell.delta_relevance = run.report.delta_relevance;
      cell.delta_visibility = run.report.delta_visibility;
      cell.delta_exposure = run.report.delta_exposure;
      cell.ndcg = run.report.ndcg;
    } catch (const std::exception& e) {
      cell.error = e.what();
      spdlog::error("cell ({}, {}) failed: {}", cell.catalog_target, cell.observation_target,
                    e.what());
    }
  });

  std::ofstream cells = OpenCsv(out_dir / "cells.csv");
  cells << "catalog_target,observation_target,catalog_share,interaction_share,"
           "relevance_share,delta_relevance,delta_visibility,delta_exposure,ndcg,error\n";
  for (const ImbalanceCell& c : sweep.cells) {
    std::string error = c.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    cells << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n",
                         c.catalog_target, c.observation_target, c.catalog_share,
                         c.interaction_share, c.relevance_share, c.delta_relevance,
                         c.delta_visibility, c.delta_exposure, c.ndcg, error);
  }
  WriteMatrix(out_dir / "relevance_share.csv", sweep, &ImbalanceCell::relevance_share);
  WriteMatrix(out_dir / "delta_visibility.csv", sweep, &ImbalanceCell::delta_visibility);
  WriteMatrix(out_dir / "delta_exposure.csv", sweep, &ImbalanceCell::delta_exposure);

  std::ofstream dat = OpenCsv(out_dir / "heatmap.dat");
  dat << "# catalog_minority observation_minority relevance_share delta_relevance "
         "delta_visibility delta_exposure\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (double x : sweep.values) {
    for (double y : sweep.values) {
      const ImbalanceCell* found = nullptr;
      for (const ImbalanceCell& c : sweep.cells) {
        if (c.catalog_target == x && c.observation_target == y && c.error.empty()) found = &c;
      }
      dat << fmt::format("{} {} {} {} {} {}\n", x, y, found ? found->relevance_share : nan,
                         found ? found->delta_relevance : nan,
                         found ? found->delta_visibility : nan,
                         found ? found->delta_exposure : nan);
    }
    dat << "\n";
  }
  return sweep;
}

std::vector<UpsampleRow> RunUpsampleSweep(sampler::Strategy strategy,
                                          const std::vector<double>& shares,
                                          const ExperimentConfig& base) {
  if (shares.empty()) throw UsageError("share list is empty");
  for (std::size_t i = 0; i < shares.size(); ++i) {
    if (!(shares[i] > 0.0 && shares[i] < 1.0)) {
      throw UsageError(fmt::format("share {} outside (0, 1)", shares[i]));
    }
    if (i > 0 && !(shares[i] > shares[i - 1])) {
      throw UsageError("shares must be strictly ascending");
    }
  }
  const fs::path out_dir =
      base.output_dir / fmt::format("upsample-{}", sampler::StrategyName(strategy));
  fs::create_directories(out_dir);
  std::vector<UpsampleRow> rows(shares.size());
  for (std::size_t i = 0; i < shares.size(); ++i) {
    UpsampleRow& row = rows[i];
    row.share = shares[i];
    ExperimentConfig config = base;
    config.setting = SettingFor(strategy, Regularizes(base.setting));
    config.target_share = shares[i];
    config.seeds = {base.seeds.front()};
    config.output_dir = out_dir / fmt::format("share-{}", shares[i]);
    try {
      const RunResult run = RunSingle(config, config.seeds.front());
      row.report = run.report;
      row.added = run.upsampled;
    } catch (const std::exception& e) {
      row.error = e.what();
      spdlog::error("share {} failed: {}", shares[i], e.what());
    }
  }
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].error.empty()) continue;
    if (!best || rows[i].report.delta_exposure < rows[*best].report.delta_exposure) best = i;
  }
  if (best) rows[*best].best_exposure = true;

  std::ofstream out = OpenCsv(out_dir / "tradeoff.csv");
  out << "share,added,ndcg,delta_relevance,delta_visibility,delta_exposure,cov_tot,cov_min,"
         "cov_maj,minority_exposure_share,best_exposure,error\n";
  for (const UpsampleRow& r : rows) {
    std::string error = r.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    if (!r.error.empty()) {
      out << fmt::format("{},,,,,,,,,,0,{}\n", r.share, error);
      continue;
    }
    const metrics::MetricsReport& m = r.report;
    out << fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{:.17g},{},\n",
                       r.share, r.added, m.ndcg, m.delta_relevance, m.delta_visibility,
                       m.delta_exposure, m.cov_tot, Optional(m.cov_min), Optional(m.cov_maj),
                       m.minority_exposure_share, r.best_exposure ? 1 : 0);
  }
  return rows;
}

std::string GnuplotHeatmapScript(const fs::path& data_file) {
  const std::string data = data_file.string();
  std::string script;
  script += "set terminal pngcairo size 1500,450\n";
  script += "set output 'heatmaps.png'\n";
  script += "set multiplot layout 1,3\n";
  script += "set xlabel 'minority share in interactions'\n";
  script += "set ylabel 'minority share in catalog'\n";
  script += "set datafile missing 'NaN'\n";
  script += "set view map\n";
  const std::pair<int, const char*> panels[] = {
      {3, "minority relevance share"}, {5, "disparate visibility"}, {6, "disparate exposure"}};
  for (const auto& [column, title] : panels) {
    script += fmt::format("set title '{}'\n", title);
    script += fmt::format("plot '{}' using 2:1:{} with image notitle\n", data, column);
  }
  script += "unset multiplot\n";
  return script;
}

}  // namespace fairrank::harness
