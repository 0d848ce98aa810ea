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

#include "fairrank/metrics.h"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace fairrank::metrics {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Shared shape of the three disparities: weight(pos, scored item) multiplies
// the provider counts of the listed item.
template <typename Weight>
DisparityResult Disparity(const RankedLists& lists, const Representations& reprs,
                          AttributeClass minority, double catalog_minority,
                          Weight weight) {
  DisparityResult out;
  out.per_user.assign(lists.lists.size(), kNaN);
  double sum = 0.0;
  std::int32_t included = 0;
  for (std::size_t u = 0; u < lists.lists.size(); ++u) {
    const auto& list = lists.lists[u];
    double num = 0.0, den = 0.0;
    for (std::size_t pos = 0; pos < list.size(); ++pos) {
      const SensitiveRepresentation& r = reprs[list[pos].item];
      const double w = weight(pos + 1, list[pos]);
      num += w * r.counts[minority];
      den += w * r.total();
    }
    if (list.empty() || !(den > 0.0)) {
      ++out.excluded_users;
      continue;
    }
    out.per_user[u] = num / den;
    sum += out.per_user[u];
    ++included;
  }
  out.minority_share = included > 0 ? sum / included : kNaN;
  out.value = std::abs(out.minority_share - catalog_minority);
  return out;
}

}  // namespace

DisparityResult DisparateRelevance(const RankedLists& lists,
                                   const Representations& reprs,
                                   AttributeClass minority, double catalog_minority) {
  return Disparity(lists, reprs, minority, catalog_minority,
                   [](std::size_t, const ScoredItem& s) { return s.score; });
}

DisparityResult DisparateVisibility(const RankedLists& lists,
                                    const Representations& reprs,
                                    AttributeClass minority, double catalog_minority) {
  return Disparity(lists, reprs, minority, catalog_minority,
                   [](std::size_t, const ScoredItem&) { return 1.0; });
}

DisparityResult DisparateExposure(const RankedLists& lists,
                                  const Representations& reprs,
                                  AttributeClass minority, double catalog_minority) {
  return Disparity(lists, reprs, minority, catalog_minority,
                   [](std::size_t pos, const ScoredItem&) {
                     return 1.0 / std::log2(static_cast<double>(pos) + 1.0);
                   });
}

NdcgResult NdcgAtK(const RankedLists& lists,
                   const std::vector<std::vector<ItemId>>& ground_truth,
                   std::int32_t k) {
  auto discount = [](std::size_t pos) {
    return pos == 1 ? 1.0 : 1.0 / std::log2(static_cast<double>(pos));
  };
  NdcgResult out;
  out.per_user.assign(lists.lists.size(), kNaN);
  double sum = 0.0;
  for (std::size_t u = 0; u < lists.lists.size() && u < ground_truth.size(); ++u) {
    const auto& truth = ground_truth[u];
    if (truth.empty()) continue;
    const auto& list = lists.lists[u];
    double dcg = 0.0;
    const std::size_t depth = std::min(list.size(), static_cast<std::size_t>(k));
    for (std::size_t pos = 1; pos <= depth; ++pos) {
      if (std::binary_search(truth.begin(), truth.end(), list[pos - 1].item)) {
        dcg += discount(pos);
      }
    }
    double idcg = 0.0;
    const std::size_t ideal = std::min(truth.size(), static_cast<std::size_t>(k));
    for (std::size_t pos = 1; pos <= ideal; ++pos) idcg += discount(pos);
    out.per_user[u] = dcg / idcg;
    sum += out.per_user[u];
    ++out.evaluated_users;
  }
  if (out.evaluated_users == 0) {
    throw ValidationError("no user has held-out items for NDCG");
  }
  out.value = sum / out.evaluated_users;
  return out;
}

CoverageResult Coverage(const RankedLists& lists, const Representations& reprs,
                        AttributeClass minority) {
  if (reprs.empty()) throw ValidationError("empty catalog");
  std::vector<char> hit(reprs.size(), 0);
  for (const auto& list : lists.lists) {
    for (const ScoredItem& s : list) hit[s.item] = 1;
  }
  std::int64_t hit_all = 0, hit_min = 0, n_min = 0, hit_maj = 0, n_maj = 0;
  for (std::size_t i = 0; i < reprs.size(); ++i) {
    hit_all += hit[i];
    if (reprs[i].counts[minority] > 0) {
      ++n_min;
      hit_min += hit[i];
    } else {
      ++n_maj;
      hit_maj += hit[i];
    }
  }
  CoverageResult out;
  out.total = static_cast<double>(hit_all) / static_cast<double>(reprs.size());
  if (n_min > 0) out.minority = static_cast<double>(hit_min) / n_min;
  if (n_maj > 0) out.majority = static_cast<double>(hit_maj) / n_maj;
  return out;
}

std::vector<std::vector<ItemId>> GroundTruth(const Dataset& heldout) {
  std::vector<std::vector<ItemId>> out(heldout.num_users);
  for (const Interaction& x : heldout.interactions) {
    if (x.provenance == Provenance::kBase) out[x.user].push_back(x.item);
  }
  for (auto& items : out) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }
  return out;
}

MetricsReport Evaluate(const RankedLists& lists, const Representations& reprs,
                       const GroupStats& stats,
                       const std::vector<std::vector<ItemId>>& ground_truth) {
  const AttributeClass a = stats.minority_class;
  const double c = stats.catalog_minority();
  MetricsReport r;
  r.k = lists.k;
  r.group_stats = stats;
  r.short_lists = lists.short_lists;

  NdcgResult ndcg = NdcgAtK(lists, ground_truth, lists.k);
  r.ndcg = ndcg.value;
  r.ndcg_users = ndcg.evaluated_users;
  r.user_ndcg = std::move(ndcg.per_user);

  DisparityResult rel = DisparateRelevance(lists, reprs, a, c);
  r.delta_relevance = rel.value;
  r.minority_relevance_share = rel.minority_share;
  r.relevance_excluded = rel.excluded_users;
  r.user_relevance_share = std::move(rel.per_user);

  DisparityResult vis = DisparateVisibility(lists, reprs, a, c);
  r.delta_visibility = vis.value;
  r.minority_visibility_share = vis.minority_share;
  r.visibility_excluded = vis.excluded_users;
  r.user_visibility_share = std::move(vis.per_user);

  DisparityResult exp = DisparateExposure(lists, reprs, a, c);
  r.delta_exposure = exp.value;
  r.minority_exposure_share = exp.minority_share;
  r.exposure_excluded = exp.excluded_users;
  r.user_exposure_share = std::move(exp.per_user);

  const CoverageResult cov = Coverage(lists, reprs, a);
  r.cov_tot = cov.total;
  r.cov_min = cov.minority;
  r.cov_maj = cov.majority;
  return r;
}

namespace {

nlohmann::json NumberOrNull(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}
nlohmann::json NumberOrNull(const std::optional<double>& v) {
  return v ? NumberOrNull(*v) : nlohmann::json(nullptr);
}
nlohmann::json Array(const std::vector<double>& values) {
  nlohmann::json arr = nlohmann::json::array();
  for (double v : values) arr.push_back(NumberOrNull(v));
  return arr;
}
double Number(const nlohmann::json& j) {
  return j.is_null() ? kNaN : j.get<double>();
}
std::vector<double> Numbers(const nlohmann::json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) out.push_back(Number(v));
  return out;
}
std::string Cell(double v) {
  return std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string();
}

}  // namespace

nlohmann::json ToJson(const MetricsReport& r, bool include_per_user) {
  nlohmann::json j = {
      {"k", r.k},
      {"ndcg", NumberOrNull(r.ndcg)},
      {"delta_relevance", NumberOrNull(r.delta_relevance)},
      {"delta_visibility", NumberOrNull(r.delta_visibility)},
      {"delta_exposure", NumberOrNull(r.delta_exposure)},
      {"cov_tot", NumberOrNull(r.cov_tot)},
      {"cov_min", NumberOrNull(r.cov_min)},
      {"cov_maj", NumberOrNull(r.cov_maj)},
      {"minority_relevance_share", NumberOrNull(r.minority_relevance_share)},
      {"minority_visibility_share", NumberOrNull(r.minority_visibility_share)},
      {"minority_exposure_share", NumberOrNull(r.minority_exposure_share)},
      {"ndcg_users", r.ndcg_users},
      {"relevance_excluded", r.relevance_excluded},
      {"visibility_excluded", r.visibility_excluded},
      {"exposure_excluded", r.exposure_excluded},
      {"short_lists", r.short_lists},
      {"minority_class", r.group_stats.minority_class},
      {"catalog_repr", r.group_stats.catalog_repr},
      {"interaction_repr", r.group_stats.interaction_repr},
  };
  if (include_per_user) {
    j["user_ndcg"] = Array(r.user_ndcg);
    j["user_relevance_share"] = Array(r.user_relevance_share);
    j["user_visibility_share"] = Array(r.user_visibility_share);
    j["user_exposure_share"] = Array(r.user_exposure_share);
  }
  return j;
}

MetricsReport ReportFromJson(const nlohmann::json& j) {
  MetricsReport r;
  r.k = j.at("k").get<std::int32_t>();
  r.ndcg = Number(j.at("ndcg"));
  r.delta_relevance = Number(j.at("delta_relevance"));
  r.delta_visibility = Number(j.at("delta_visibility"));
  r.delta_exposure = Number(j.at("delta_exposure"));
  r.cov_tot = Number(j.at("cov_tot"));
  if (!j.at("cov_min").is_null()) r.cov_min = j.at("cov_min").get<double>();
  if (!j.at("cov_maj").is_null()) r.cov_maj = j.at("cov_maj").get<double>();
  r.minority_relevance_share = Number(j.at("minority_relevance_share"));
  r.minority_visibility_share = Number(j.at("minority_visibility_share"));
  r.minority_exposure_share = Number(j.at("minority_exposure_share"));
  r.ndcg_users = j.at("ndcg_users").get<std::int32_t>();
  r.relevance_excluded = j.at("relevance_excluded").get<std::int32_t>();
  r.visibility_excluded = j.at("visibility_excluded").get<std::int32_t>();
  r.exposure_excluded = j.at("exposure_excluded").get<std::int32_t>();
  r.short_lists = j.at("short_lists").get<std::int32_t>();
  r.group_stats.minority_class = j.at("minority_class").get<AttributeClass>();
  r.group_stats.catalog_repr = j.at("catalog_repr").get<std::vector<double>>();
  r.group_stats.interaction_repr = j.at("interaction_repr").get<std::vector<double>>();
  r.user_ndcg = Numbers(j, "user_ndcg");
  r.user_relevance_share = Numbers(j, "user_relevance_share");
  r.user_visibility_share = Numbers(j, "user_visibility_share");
  r.user_exposure_share = Numbers(j, "user_exposure_share");
  return r;
}

std::string CsvHeader() {
  return "k,ndcg,delta_relevance,delta_visibility,delta_exposure,cov_tot,cov_min,"
         "cov_maj,minority_relevance_share,minority_visibility_share,"
         "minority_exposure_share,catalog_minority,interaction_minority";
}

std::string CsvRow(const MetricsReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}", r.k, Cell(r.ndcg),
                     Cell(r.delta_relevance), Cell(r.delta_visibility),
                     Cell(r.delta_exposure), Cell(r.cov_tot),
                     r.cov_min ? Cell(*r.cov_min) : "", r.cov_maj ? Cell(*r.cov_maj) : "",
                     Cell(r.minority_relevance_share), Cell(r.minority_visibility_share),
                     Cell(r.minority_exposure_share),
                     Cell(r.group_stats.catalog_minority()),
                     Cell(r.group_stats.interaction_minority()));
}

}  // namespace fairrank::metrics
