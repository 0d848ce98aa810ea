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
#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <unordered_set>

#include "fairrank/rng.h"
#include "fairrank/sampler.h"

namespace fairrank::sampler {

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kReal: return "real";
    case Strategy::kFake: return "fake";
    case Strategy::kFakeByPop: return "fake_by_pop";
  }
  return "real";
}

Strategy ParseStrategy(std::string_view name) {
  if (name == "real") return Strategy::kReal;
  if (name == "fake") return Strategy::kFake;
  if (name == "fake_by_pop" || name == "fake-by-pop") return Strategy::kFakeByPop;
  throw ValidationError(fmt::format("unknown upsampling strategy '{}'", name));
}

Provenance ProvenanceFor(Strategy s) {
  switch (s) {
    case Strategy::kReal: return Provenance::kReal;
    case Strategy::kFake: return Provenance::kFake;
    case Strategy::kFakeByPop: return Provenance::kFakeByPop;
  }
  return Provenance::kReal;
}

namespace {

std::int64_t PairKey(UserId u, ItemId i, std::int32_t num_items) {
  return static_cast<std::int64_t>(u) * num_items + i;
}

// Tracks which (user, item) pairs exist and samples fresh users per item.
class PairIndex {
 public:
  explicit PairIndex(const Dataset& ds)
      : num_users_(ds.num_users), num_items_(ds.num_items),
        users_per_item_(ds.num_items, 0) {
    pairs_.reserve(ds.interactions.size() * 2);
    for (const Interaction& x : ds.interactions) Insert(x.user, x.item);
  }

  bool Contains(UserId u, ItemId i) const {
    return pairs_.contains(PairKey(u, i, num_items_));
  }
  void Insert(UserId u, ItemId i) {
    if (pairs_.insert(PairKey(u, i, num_items_)).second) ++users_per_item_[i];
  }
  bool Saturated(ItemId i) const { return users_per_item_[i] >= num_users_; }

  // Uniform over users without a pair on i. Requires !Saturated(i).
  UserId FreshUser(ItemId i, Rng& rng) const {
    if (users_per_item_[i] * 2 < num_users_) {
      for (;;) {
        const auto u = static_cast<UserId>(rng.UniformInt(num_users_));
        if (!Contains(u, i)) return u;
      }
    }
    std::vector<UserId> fresh;
    for (UserId u = 0; u < num_users_; ++u) {
      if (!Contains(u, i)) fresh.push_back(u);
    }
    return fresh[rng.UniformInt(fresh.size())];
  }

 private:
  std::int32_t num_users_;
  std::int32_t num_items_;
  std::vector<std::int32_t> users_per_item_;
  std::unordered_set<std::int64_t> pairs_;
};

}  // namespace

UpsampleResult Upsample(const Dataset& dataset, const Representations& reprs,
                        const GroupStats& stats, const UpsampleConfig& config) {
  const AttributeClass minority = stats.minority_class;
  const double rows0 = static_cast<double>(dataset.interactions.size());
  if (rows0 == 0) throw ValidationError("cannot upsample an empty interaction set");
  double mass = InteractionMass(dataset, reprs, minority);
  const double share0 = mass / rows0;
  const double target = config.target_share.value_or(stats.catalog_minority());
  if (!(target > 0.0 && target < 1.0)) {
    throw ValidationError(fmt::format("target share {} outside (0, 1)", target));
  }
  if (target < share0 - 1e-12) {
    throw ValidationError(fmt::format(
        "target share {} is below the current minority share {}", target, share0));
  }

  UpsampleResult result;
  result.dataset = dataset;
  result.share_before = share0;
  result.share_after = share0;
  result.target = target;
  if (mass >= target * rows0) return result;

  // Item weights per strategy.
  std::vector<double> weights(dataset.num_items, 0.0);
  std::vector<std::vector<std::size_t>> rows_by_item;
  const auto popularity = ItemPopularity(dataset);
  if (config.strategy == Strategy::kReal) {
    rows_by_item.resize(dataset.num_items);
    for (std::size_t r = 0; r < dataset.interactions.size(); ++r) {
      rows_by_item[dataset.interactions[r].item].push_back(r);
    }
  }
  for (ItemId i = 0; i < dataset.num_items; ++i) {
    const double s = reprs[i].share[minority];
    if (s <= 0.0) continue;
    switch (config.strategy) {
      case Strategy::kReal:
        if (!rows_by_item[i].empty()) weights[i] = s;
        break;
      case Strategy::kFake:
        weights[i] = s;
        break;
      case Strategy::kFakeByPop:
        weights[i] = static_cast<double>(popularity[i]);
        break;
    }
  }
  double weight_total = 0.0, weighted_share = 0.0;
  for (ItemId i = 0; i < dataset.num_items; ++i) {
    weight_total += weights[i];
    weighted_share += weights[i] * reprs[i].share[minority];
  }
  if (weight_total <= 0.0) {
    throw ValidationError(fmt::format(
        "no minority items available for {} upsampling", StrategyName(config.strategy)));
  }
  // Planned count solves (mass + a*gain) / (rows + a) = target.
  const double expected_gain = weighted_share / weight_total;
  if (expected_gain <= target) {
    throw ValidationError(fmt::format(
        "target {} unreachable: an added interaction carries on average {} "
        "minority share", target, expected_gain));
  }
  result.planned = static_cast<std::int64_t>(
      std::ceil((target * rows0 - mass) / (expected_gain - target)));

  Rng rng(config.seed);
  WeightedSampler sampler(weights);
  std::optional<PairIndex> pairs;
  if (config.strategy != Strategy::kReal) pairs.emplace(dataset);
  const Provenance tag = ProvenanceFor(config.strategy);
  auto& out = result.dataset.interactions;
  out.reserve(out.size() + static_cast<std::size_t>(result.planned) + 16);
  double rows = rows0;
  const std::int64_t draw_cap = 100 * result.planned + 1000;
  std::int64_t draws = 0;

  while (mass < target * rows) {
    if (config.max_added && result.added >= *config.max_added) {
      result.capped = true;
      break;
    }
    if (++draws > draw_cap) {
      throw Error(fmt::format("upsampling made no progress after {} draws", draw_cap));
    }
    const auto item = static_cast<ItemId>(sampler.Sample(rng));
    if (config.strategy == Strategy::kReal) {
      const auto& candidates = rows_by_item[item];
      Interaction copy = dataset.interactions[candidates[rng.UniformInt(candidates.size())]];
      copy.provenance = tag;
      out.push_back(copy);
    } else {
      if (pairs->Saturated(item)) {
        weights[item] = 0.0;
        sampler = WeightedSampler(weights);
        if (sampler.total() <= 0.0) {
          throw Error(fmt::format(
              "{} upsampling exhausted every minority item after adding {}; "
              "share {:.6f} short of target {:.6f}",
              StrategyName(config.strategy), result.added, mass / rows, target));
        }
        continue;
      }
      const UserId user = pairs->FreshUser(item, rng);
      pairs->Insert(user, item);
      out.push_back({user, item, 1.0, std::nullopt, tag});
    }
    mass += reprs[item].share[minority];
    rows += 1.0;
    ++result.added;
  }
  result.share_after = mass / rows;
  spdlog::debug("upsample {}: added {} (planned {}), share {:.4f} -> {:.4f}",
                StrategyName(config.strategy), result.added, result.planned,
                share0, result.share_after);
  return result;
}

}  // namespace fairrank::sampler
