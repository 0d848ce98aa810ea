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

#include "fairrank/ingest.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <spdlog/spdlog.h>
#include <unordered_map>

#include "fairrank/rng.h"
#include "json.hpp"

namespace fairrank::ingest {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(Trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
std::optional<T> ParseNumber(std::string_view s) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

// Reads non-empty lines of a delimited file, detecting the delimiter from the
// first line and calling fn(fields, line_number).
template <typename Fn>
void ForEachRow(const std::filesystem::path& path, Fn fn) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open {}", path.string()));
  std::string line;
  std::int64_t number = 0;
  char delim = 0;
  while (std::getline(in, line)) {
    ++number;
    if (Trim(line).empty()) continue;
    if (delim == 0) delim = line.find('\t') != std::string::npos ? '\t' : ',';
    fn(SplitFields(line, delim), number);
  }
}

class KeyIndex {
 public:
  std::int32_t Intern(std::string_view key) {
    auto [it, inserted] = ids_.try_emplace(std::string(key), static_cast<std::int32_t>(keys_.size()));
    if (inserted) keys_.emplace_back(key);
    return it->second;
  }
  std::optional<std::int32_t> Find(const std::string& key) const {
    auto it = ids_.find(key);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }
  std::vector<std::string> keys() && { return std::move(keys_); }

 private:
  std::unordered_map<std::string, std::int32_t> ids_;
  std::vector<std::string> keys_;
};

}  // namespace

std::vector<RawRating> ReadRatings(const std::filesystem::path& path) {
  std::vector<RawRating> rows;
  bool first = true;
  ForEachRow(path, [&](const std::vector<std::string_view>& f, std::int64_t line) {
    const bool is_first = std::exchange(first, false);
    if (f.size() < 3 || f.size() > 5) {
      throw ParseError(fmt::format("{}: expected 3 to 5 columns, got {}",
                                   path.string(), f.size()), line);
    }
    const auto rating = ParseNumber<double>(f[2]);
    if (!rating) {
      if (is_first) return;  // header
      throw ParseError(fmt::format("{}: rating '{}' is not a number", path.string(), f[2]),
                       line);
    }
    if (!std::isfinite(*rating)) {
      throw ParseError(fmt::format("{}: non-finite rating", path.string()), line);
    }
    if (f[0].empty() || f[1].empty()) {
      throw ParseError(fmt::format("{}: empty user or item key", path.string()), line);
    }
    RawRating r{std::string(f[0]), std::string(f[1]), *rating, std::nullopt,
                Provenance::kBase};
    if (f.size() >= 4 && !f[3].empty()) {
      r.timestamp = ParseNumber<std::int64_t>(f[3]);
      if (!r.timestamp) {
        throw ParseError(fmt::format("{}: timestamp '{}' is not an integer",
                                     path.string(), f[3]), line);
      }
    }
    if (f.size() == 5) {
      try {
        r.provenance = ParseProvenance(f[4]);
      } catch (const ValidationError& e) {
        throw ParseError(fmt::format("{}: {}", path.string(), e.what()), line);
      }
    }
    rows.push_back(std::move(r));
  });
  return rows;
}

LoadedDataset LoadDataset(const std::filesystem::path& ratings_path,
                          const std::filesystem::path& providers_path,
                          const std::filesystem::path& attributes_path,
                          const LoadOptions& options) {
  LoadedDataset out;

  // provider key -> class
  std::unordered_map<std::string, AttributeClass> attribute_of;
  bool first = true;
  AttributeClass max_class = -1;
  ForEachRow(attributes_path, [&](const std::vector<std::string_view>& f, std::int64_t line) {
    const bool is_first = std::exchange(first, false);
    if (f.size() < 2) {
      throw ParseError(fmt::format("{}: expected provider,class", attributes_path.string()),
                       line);
    }
    const auto cls = ParseNumber<AttributeClass>(f[1]);
    if (!cls || *cls < 0) {
      if (is_first && !cls) return;  // header
      throw ParseError(fmt::format("{}: class '{}' is not a non-negative integer",
                                   attributes_path.string(), f[1]), line);
    }
    attribute_of[std::string(f[0])] = *cls;
    max_class = std::max(max_class, *cls);
  });
  const std::int32_t cardinality = options.attribute_cardinality > 0
                                       ? options.attribute_cardinality
                                       : std::max<std::int32_t>(2, max_class + 1);
  if (max_class >= cardinality) {
    throw ValidationError(fmt::format("attribute class {} exceeds cardinality {}",
                                      max_class, cardinality));
  }

  // item key -> labeled providers, in file order.
  KeyIndex items, providers;
  std::vector<std::vector<ProviderId>> item_providers;
  std::vector<AttributeClass> provider_attribute;
  std::unordered_map<std::string, bool> seen_item;
  first = true;
  ForEachRow(providers_path, [&](const std::vector<std::string_view>& f, std::int64_t line) {
    const bool is_first = std::exchange(first, false);
    if (f.size() < 2 || f[0].empty() || f[1].empty()) {
      throw ParseError(fmt::format("{}: expected item,provider", providers_path.string()),
                       line);
    }
    const std::string item_key(f[0]), provider_key(f[1]);
    auto attr = attribute_of.find(provider_key);
    if (attr == attribute_of.end()) {
      if (is_first && f[0] == "item") return;  // header
      seen_item.try_emplace(item_key, false);
      return;
    }
    seen_item[item_key] = true;
    const ItemId i = items.Intern(item_key);
    if (i == static_cast<ItemId>(item_providers.size())) item_providers.emplace_back();
    const ProviderId p = providers.Intern(provider_key);
    if (p == static_cast<ProviderId>(provider_attribute.size())) {
      provider_attribute.push_back(attr->second);
    }
    auto& list = item_providers[i];
    if (std::find(list.begin(), list.end(), p) == list.end()) list.push_back(p);
  });
  for (const auto& [key, labeled] : seen_item) {
    if (!labeled) ++out.dropped_items;
  }
  if (out.dropped_items > 0) {
    spdlog::info("dropped {} items without a labeled provider", out.dropped_items);
  }

  // Latest rating per (user, item); equal timestamps keep the later row.
  const std::vector<RawRating> raw = ReadRatings(ratings_path);
  std::unordered_map<std::string, std::size_t> latest;
  latest.reserve(raw.size());
  std::vector<char> keep(raw.size(), 1);
  for (std::size_t r = 0; r < raw.size(); ++r) {
    std::string key = raw[r].user;
    key.push_back('\x1f');
    key += raw[r].item;
    auto [it, inserted] = latest.try_emplace(std::move(key), r);
    if (inserted) continue;
    ++out.duplicate_rows;
    const RawRating& prev = raw[it->second];
    const bool newer = raw[r].timestamp.value_or(INT64_MIN) >=
                       prev.timestamp.value_or(INT64_MIN);
    if (newer) {
      keep[it->second] = 0;
      it->second = r;
    } else {
      keep[r] = 0;
    }
  }

  KeyIndex users;
  Dataset& ds = out.dataset;
  for (std::size_t r = 0; r < raw.size(); ++r) {
    if (!keep[r]) continue;
    const RawRating& row = raw[r];
    const bool positive = options.mode == ThresholdMode::kAtLeast
                              ? row.rating >= options.threshold
                              : row.rating == options.threshold;
    if (!positive) {
      ++out.below_threshold;
      continue;
    }
    const auto item = items.Find(row.item);
    if (!item) {
      ++out.dropped_rows;
      continue;
    }
    ds.interactions.push_back(
        {users.Intern(row.user), *item, row.rating, row.timestamp, row.provenance});
  }
  out.keys.users = std::move(users).keys();
  out.keys.items = std::move(items).keys();
  out.keys.providers = std::move(providers).keys();
  ds.num_users = static_cast<std::int32_t>(out.keys.users.size());
  ds.num_items = static_cast<std::int32_t>(out.keys.items.size());
  ds.item_providers = std::move(item_providers);
  ds.provider_attribute = std::move(provider_attribute);
  ds.attribute_cardinality = cardinality;
  ds.Validate();
  return out;
}

void WriteKeyMaps(const std::filesystem::path& dir, const KeyMaps& keys) {
  std::filesystem::create_directories(dir);
  auto write = [&](const char* name, const std::vector<std::string>& values) {
    std::ofstream out(dir / name);
    if (!out) throw Error(fmt::format("cannot write {}", (dir / name).string()));
    out << "index,key\n";
    for (std::size_t i = 0; i < values.size(); ++i) out << i << ',' << values[i] << '\n';
  };
  write("user_keys.csv", keys.users);
  write("item_keys.csv", keys.items);
  write("provider_keys.csv", keys.providers);
}

void SplitSpec::Validate() const {
  if (!(train > 0.0 && validation > 0.0 && test > 0.0)) {
    throw ValidationError("split fractions must be positive");
  }
  if (std::abs(train + validation + test - 1.0) > 1e-9) {
    throw ValidationError("split fractions must sum to 1");
  }
  if (min_history < 0) throw ValidationError("min_history must be non-negative");
}

Splits Split(const Dataset& dataset, const SplitSpec& spec) {
  spec.Validate();
  std::vector<std::vector<std::size_t>> rows_of(dataset.num_users);
  for (std::size_t r = 0; r < dataset.interactions.size(); ++r) {
    const Interaction& x = dataset.interactions[r];
    if (spec.mode == SplitMode::kTemporal && !x.timestamp) {
      throw ValidationError("temporal split requires timestamps on every interaction");
    }
    rows_of[x.user].push_back(r);
  }
  Splits out{dataset.EmptyCopy(), dataset.EmptyCopy(), dataset.EmptyCopy()};
  Rng rng(spec.seed);
  for (UserId u = 0; u < dataset.num_users; ++u) {
    auto& rows = rows_of[u];
    if (spec.mode == SplitMode::kTemporal) {
      std::stable_sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
        return *dataset.interactions[a].timestamp < *dataset.interactions[b].timestamp;
      });
    } else {
      rng.Shuffle(rows);
    }
    const auto n = static_cast<std::int64_t>(rows.size());
    std::int64_t n_test = 0, n_val = 0;
    if (n >= spec.min_history) {
      // Small epsilon keeps e.g. 10 * 0.2 from flooring to 1.
      n_test = static_cast<std::int64_t>(std::floor(n * spec.test + 1e-9));
      n_val = static_cast<std::int64_t>(std::floor(n * spec.validation + 1e-9));
    }
    const std::int64_t n_train = n - n_test - n_val;
    for (std::int64_t k = 0; k < n; ++k) {
      const Interaction& x = dataset.interactions[rows[k]];
      if (k < n_train) {
        out.train.interactions.push_back(x);
      } else if (k < n_train + n_val) {
        out.validation.interactions.push_back(x);
      } else {
        out.test.interactions.push_back(x);
      }
    }
  }
  return out;
}

void WriteDataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "interactions.csv");
    if (!out) throw Error(fmt::format("cannot write into {}", dir.string()));
    out << "user,item,rating,timestamp,provenance\n";
    for (const Interaction& x : ds.interactions) {
      out << fmt::format("{},{},{:.17g},{},{}\n", x.user, x.item, x.rating,
                         x.timestamp ? std::to_string(*x.timestamp) : std::string(),
                         ProvenanceName(x.provenance));
    }
  }
  {
    std::ofstream out(dir / "providers.csv");
    out << "item,provider\n";
    for (ItemId i = 0; i < ds.num_items; ++i) {
      for (ProviderId p : ds.item_providers[i]) out << i << ',' << p << '\n';
    }
  }
  {
    std::ofstream out(dir / "attributes.csv");
    out << "provider,class\n";
    for (ProviderId p = 0; p < ds.num_providers(); ++p) {
      out << p << ',' << ds.provider_attribute[p] << '\n';
    }
  }
  const nlohmann::json meta = {{"num_users", ds.num_users},
                               {"num_items", ds.num_items},
                               {"num_providers", ds.num_providers()},
                               {"attribute_cardinality", ds.attribute_cardinality},
                               {"num_interactions", ds.interactions.size()}};
  std::ofstream(dir / "dataset.json") << meta.dump(2) << '\n';
}

Dataset ReadDataset(const std::filesystem::path& dir) {
  std::ifstream meta_in(dir / "dataset.json");
  if (!meta_in) throw Error(fmt::format("{} has no dataset.json", dir.string()));
  const nlohmann::json meta = nlohmann::json::parse(meta_in);
  Dataset ds;
  ds.num_users = meta.at("num_users").get<std::int32_t>();
  ds.num_items = meta.at("num_items").get<std::int32_t>();
  ds.attribute_cardinality = meta.at("attribute_cardinality").get<std::int32_t>();
  ds.provider_attribute.assign(meta.at("num_providers").get<std::int32_t>(), 0);
  ds.item_providers.resize(ds.num_items);

  auto index = [](std::string_view s, std::int64_t line, const std::filesystem::path& p) {
    const auto v = ParseNumber<std::int32_t>(s);
    if (!v) throw ParseError(fmt::format("{}: '{}' is not an index", p.string(), s), line);
    return *v;
  };
  bool first = true;
  ForEachRow(dir / "attributes.csv", [&](const auto& f, std::int64_t line) {
    if (std::exchange(first, false)) return;
    const auto p = index(f.at(0), line, dir / "attributes.csv");
    if (p < 0 || p >= ds.num_providers()) throw ParseError("provider out of range", line);
    ds.provider_attribute[p] = index(f.at(1), line, dir / "attributes.csv");
  });
  first = true;
  ForEachRow(dir / "providers.csv", [&](const auto& f, std::int64_t line) {
    if (std::exchange(first, false)) return;
    const auto i = index(f.at(0), line, dir / "providers.csv");
    if (i < 0 || i >= ds.num_items) throw ParseError("item out of range", line);
    ds.item_providers[i].push_back(index(f.at(1), line, dir / "providers.csv"));
  });
  const std::filesystem::path interactions = dir / "interactions.csv";
  for (RawRating& r : ReadRatings(interactions)) {
    ds.interactions.push_back({index(r.user, 0, interactions), index(r.item, 0, interactions),
                               r.rating, r.timestamp, r.provenance});
  }
  ds.Validate();
  return ds;
}

}  // namespace fairrank::ingest
