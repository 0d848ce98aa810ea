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
#include <optional>
#include <string>
#include <vector>

#include "fairrank/core.h"
#include "fairrank/ranking.h"
#include "json.hpp"

namespace fairrank::metrics {

// |mean over users of the minority ratio - catalog share|. per_user holds each
// user's ratio, NaN where the user was excluded (non-positive denominator or
// empty list).
struct DisparityResult {
  double value = 0.0;
  double minority_share = 0.0;  // mean of the included ratios
  std::int32_t excluded_users = 0;
  std::vector<double> per_user;
};

// Relevance-weighted; uses raw provider counts, no position weight.
DisparityResult DisparateRelevance(const RankedLists& lists,
                                   const Representations& reprs,
                                   AttributeClass minority, double catalog_minority);
// Slot counts only; scores are ignored.
DisparityResult DisparateVisibility(const RankedLists& lists,
                                    const Representations& reprs,
                                    AttributeClass minority, double catalog_minority);
// Slot counts weighted by 1/log2(pos + 1) in numerator and denominator.
DisparityResult DisparateExposure(const RankedLists& lists,
                                  const Representations& reprs,
                                  AttributeClass minority, double catalog_minority);

// Discount of 1 at position 1 and 1/log2(pos) after, binary gains.
// ground_truth[u] must be sorted; users with no ground truth are skipped and
// get NaN in per_user. Throws when no user has ground truth.
struct NdcgResult {
  double value = 0.0;
  std::int32_t evaluated_users = 0;
  std::vector<double> per_user;
};
NdcgResult NdcgAtK(const RankedLists& lists,
                   const std::vector<std::vector<ItemId>>& ground_truth,
                   std::int32_t k);

// Minority items are those with at least one minority provider. A vacuous
// item set leaves the corresponding value empty.
struct CoverageResult {
  double total = 0.0;
  std::optional<double> minority;
  std::optional<double> majority;
};
CoverageResult Coverage(const RankedLists& lists, const Representations& reprs,
                        AttributeClass minority);

// Sorted base-row items per user.
std::vector<std::vector<ItemId>> GroundTruth(const Dataset& heldout);

struct MetricsReport {
  std::int32_t k = 10;
  double ndcg = 0.0;
  double delta_relevance = 0.0;
  double delta_visibility = 0.0;
  double delta_exposure = 0.0;
  double cov_tot = 0.0;
  std::optional<double> cov_min;
  std::optional<double> cov_maj;
  double minority_relevance_share = 0.0;
  double minority_visibility_share = 0.0;
  double minority_exposure_share = 0.0;
  std::int32_t ndcg_users = 0;
  std::int32_t relevance_excluded = 0;
  std::int32_t visibility_excluded = 0;
  std::int32_t exposure_excluded = 0;
  std::int32_t short_lists = 0;
  GroupStats group_stats;

  // Per-user values, kept for bootstrap comparison.
  std::vector<double> user_ndcg;
  std::vector<double> user_relevance_share;
  std::vector<double> user_visibility_share;
  std::vector<double> user_exposure_share;
};

MetricsReport Evaluate(const RankedLists& lists, const Representations& reprs,
                       const GroupStats& stats,
                       const std::vector<std::vector<ItemId>>& ground_truth);

// Flat key -> value object; per-user arrays only when requested.
nlohmann::json ToJson(const MetricsReport& report, bool include_per_user = false);
MetricsReport ReportFromJson(const nlohmann::json& j);

// Column names of CsvRow, comma separated.
std::string CsvHeader();
std::string CsvRow(const MetricsReport& report);

}  // namespace fairrank::metrics
