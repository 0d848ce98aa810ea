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
#include <fstream>
#include <limits>

#include "fairrank/harness.h"
#include "fairrank/rng.h"
#include "fmt/format.h"

namespace fairrank::harness {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Mean of the non-NaN values picked by `index`; NaN when none.
double MeanOver(const std::vector<double>& values, const std::vector<std::size_t>& index) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (std::size_t i : index) {
    if (std::isnan(values[i])) continue;
    sum += values[i];
    ++n;
  }
  return n > 0 ? sum / static_cast<double>(n) : kNaN;
}

// Linear-interpolated quantile of sorted data.
double Quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct PerUserMetric {
  std::string name;
  const std::vector<double>& (*values)(const metrics::MetricsReport&);
  double (*value)(const metrics::MetricsReport&);
  bool disparity;  // statistic is |mean - catalog share| rather than the mean
};

const std::vector<PerUserMetric>& PerUserMetrics() {
  static const std::vector<PerUserMetric> all = {
      {"ndcg", [](const metrics::MetricsReport& r) -> const std::vector<double>& {
         return r.user_ndcg;
       }, [](const metrics::MetricsReport& r) { return r.ndcg; }, false},
      {"delta_relevance", [](const metrics::MetricsReport& r) -> const std::vector<double>& {
         return r.user_relevance_share;
       }, [](const metrics::MetricsReport& r) { return r.delta_relevance; }, true},
      {"delta_visibility", [](const metrics::MetricsReport& r) -> const std::vector<double>& {
         return r.user_visibility_share;
       }, [](const metrics::MetricsReport& r) { return r.delta_visibility; }, true},
      {"delta_exposure", [](const metrics::MetricsReport& r) -> const std::vector<double>& {
         return r.user_exposure_share;
       }, [](const metrics::MetricsReport& r) { return r.delta_exposure; }, true},
  };
  return all;
}

double Statistic(const PerUserMetric& metric, const metrics::MetricsReport& report,
                 const std::vector<std::size_t>& index) {
  const double mean = MeanOver(metric.values(report), index);
  return metric.disparity ? std::abs(mean - report.group_stats.catalog_minority()) : mean;
}

void CheckComparable(const LoadedRunReport& ref, const LoadedRunReport& other) {
  if (ref.dataset_id != other.dataset_id) {
    throw Error(fmt::format("reports use different datasets ({} vs {})", ref.dataset_id,
                            other.dataset_id));
  }
  if (ref.seed != other.seed) {
    throw Error(fmt::format("reports use different seeds ({} vs {})", ref.seed, other.seed));
  }
  for (const PerUserMetric& m : PerUserMetrics()) {
    if (m.values(ref.metrics).size() != m.values(other.metrics).size()) {
      throw Error(fmt::format("reports disagree on the user count for {}", m.name));
    }
  }
}

}  // namespace

std::vector<MetricComparison> CompareSettings(const std::vector<LoadedRunReport>& reports,
                                              const ComparisonOptions& options) {
  if (reports.size() < 2) throw UsageError("comparison needs at least two reports");
  if (options.resamples < 1) throw UsageError("resamples must be positive");
  const LoadedRunReport& ref = reports.front();
  std::vector<MetricComparison> rows;
  for (std::size_t r = 1; r < reports.size(); ++r) {
    const LoadedRunReport& cand = reports[r];
    CheckComparable(ref, cand);
    const std::size_t users = ref.metrics.user_ndcg.size();

    std::vector<std::vector<double>> deltas(PerUserMetrics().size());
    Rng rng(options.seed);
    std::vector<std::size_t> index(users);
    for (std::int32_t b = 0; b < options.resamples && users > 0; ++b) {
      for (std::size_t& i : index) i = rng.UniformInt(users);
      for (std::size_t m = 0; m < PerUserMetrics().size(); ++m) {
        const PerUserMetric& metric = PerUserMetrics()[m];
        const double d = Statistic(metric, cand.metrics, index) -
                         Statistic(metric, ref.metrics, index);
        if (!std::isnan(d)) deltas[m].push_back(d);
      }
    }

    for (std::size_t m = 0; m < PerUserMetrics().size(); ++m) {
      const PerUserMetric& metric = PerUserMetrics()[m];
      MetricComparison row;
      row.metric = metric.name;
      row.reference = ref.setting;
      row.candidate = cand.setting;
      row.reference_value = metric.value(ref.metrics);
      row.candidate_value = metric.value(cand.metrics);
      row.delta = row.candidate_value - row.reference_value;
      std::vector<double>& d = deltas[m];
      if (!d.empty()) {
        std::sort(d.begin(), d.end());
        row.ci_low = Quantile(d, 0.025);
        row.ci_high = Quantile(d, 0.975);
        row.significant = *row.ci_low > 0.0 || *row.ci_high < 0.0;
      }
      rows.push_back(row);
    }

    const std::pair<const char*, std::pair<std::optional<double>, std::optional<double>>>
        coverage[] = {
            {"cov_tot", {ref.metrics.cov_tot, cand.metrics.cov_tot}},
            {"cov_min", {ref.metrics.cov_min, cand.metrics.cov_min}},
            {"cov_maj", {ref.metrics.cov_maj, cand.metrics.cov_maj}},
        };
    for (const auto& [name, values] : coverage) {
      if (!values.first || !values.second) continue;
      MetricComparison row;
      row.metric = name;
      row.reference = ref.setting;
      row.candidate = cand.setting;
      row.reference_value = *values.first;
      row.candidate_value = *values.second;
      row.delta = row.candidate_value - row.reference_value;
      rows.push_back(row);
    }
  }
  return rows;
}

void WriteComparisonCsv(const std::vector<MetricComparison>& rows,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << "metric,reference,candidate,reference_value,candidate_value,delta,ci_low,ci_high,"
         "significant,ci_method\n";
  for (const MetricComparison& r : rows) {
    out << fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{},{},{},{}\n", r.metric, r.reference,
                       r.candidate, r.reference_value, r.candidate_value, r.delta,
                       r.ci_low ? fmt::format("{:.17g}", *r.ci_low) : "",
                       r.ci_high ? fmt::format("{:.17g}", *r.ci_high) : "",
                       r.significant ? 1 : 0,
                       r.ci_low ? "user_bootstrap_percentile_95" : "none");
  }
}

}  // namespace fairrank::harness
