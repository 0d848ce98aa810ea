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


#include <array>
#include <cmath>

#include "fairrank/harness.h"
#include "fmt/format.h"

namespace fairrank::harness {
namespace {

constexpr double kDefaultRegLambda = 1e-6;

struct SettingInfo {
  Setting setting;
  std::string_view name;
  bool upsamples;
  bool regularizes;
  sampler::Strategy strategy;
};

constexpr std::array<SettingInfo, 8> kSettings{{
    {Setting::kBaseline, "baseline", false, false, sampler::Strategy::kReal},
    {Setting::kReal, "real", true, false, sampler::Strategy::kReal},
    {Setting::kFake, "fake", true, false, sampler::Strategy::kFake},
    {Setting::kFakeByPop, "fake_by_pop", true, false, sampler::Strategy::kFakeByPop},
    {Setting::kReg, "reg", false, true, sampler::Strategy::kReal},
    {Setting::kRealReg, "real_reg", true, true, sampler::Strategy::kReal},
    {Setting::kFakeReg, "fake_reg", true, true, sampler::Strategy::kFake},
    {Setting::kFakeByPopReg, "fake_by_pop_reg", true, true, sampler::Strategy::kFakeByPop},
}};

const SettingInfo& Info(Setting s) {
  for (const SettingInfo& info : kSettings) {
    if (info.setting == s) return info;
  }
  throw Error("unknown setting");
}

nlohmann::json SplitToJson(const ingest::SplitSpec& s) {
  return {{"mode", s.mode == ingest::SplitMode::kTemporal ? "temporal" : "random"},
          {"train", s.train},
          {"validation", s.validation},
          {"test", s.test},
          {"seed", s.seed},
          {"min_history", s.min_history}};
}

ingest::SplitSpec SplitFromJson(const nlohmann::json& j) {
  ingest::SplitSpec s;
  const std::string mode = j.value("mode", std::string("temporal"));
  if (mode == "temporal") {
    s.mode = ingest::SplitMode::kTemporal;
  } else if (mode == "random") {
    s.mode = ingest::SplitMode::kRandom;
  } else {
    throw UsageError(fmt::format("unknown split mode '{}'", mode));
  }
  s.train = j.value("train", s.train);
  s.validation = j.value("validation", s.validation);
  s.test = j.value("test", s.test);
  s.seed = j.value("seed", s.seed);
  s.min_history = j.value("min_history", s.min_history);
  return s;
}

}  // namespace

std::string_view SettingName(Setting s) { return Info(s).name; }

Setting ParseSetting(std::string_view name) {
  for (const SettingInfo& info : kSettings) {
    if (info.name == name) return info.setting;
  }
  throw UsageError(fmt::format("unknown setting '{}'", name));
}

bool Upsamples(Setting s) { return Info(s).upsamples; }
bool Regularizes(Setting s) { return Info(s).regularizes; }

sampler::Strategy StrategyOf(Setting s) {
  if (!Upsamples(s)) {
    throw Error(fmt::format("setting '{}' does not upsample", SettingName(s)));
  }
  return Info(s).strategy;
}

const std::vector<Setting>& AllSettings() {
  static const std::vector<Setting> all = [] {
    std::vector<Setting> v;
    for (const SettingInfo& info : kSettings) v.push_back(info.setting);
    return v;
  }();
  return all;
}

double ExperimentConfig::EffectiveLambda() const {
  if (!Regularizes(setting)) return 0.0;
  return lambda > 0.0 ? lambda : kDefaultRegLambda;
}

void ExperimentConfig::Validate() const {
  const int sources = static_cast<int>(synth.has_value()) +
                      static_cast<int>(files.has_value()) +
                      static_cast<int>(dataset_dir.has_value());
  if (sources != 1) {
    throw UsageError("exactly one data source (synthetic, files or dataset dir) is required");
  }
  try {
    if (synth) synth->Validate();
    split.Validate();
    train.Validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw UsageError(fmt::format("lambda must lie in [0, 1], got {}", lambda));
  }
  if (target_share && !(*target_share > 0.0 && *target_share < 1.0)) {
    throw UsageError(fmt::format("target share must lie in (0, 1), got {}", *target_share));
  }
  if (triplets_per_observation < 1) {
    throw UsageError("triplets per observation must be at least 1");
  }
  if (k < 1) throw UsageError("k must be at least 1");
  if (seeds.empty()) throw UsageError("at least one seed is required");
}

nlohmann::json ToJson(const ExperimentConfig& c) {
  nlohmann::json j;
  if (c.synth) j["synth"] = synthgen::ToJson(*c.synth);
  if (c.files) {
    j["files"] = {{"ratings", c.files->ratings.string()},
                  {"providers", c.files->providers.string()},
                  {"attributes", c.files->attributes.string()},
                  {"threshold", c.files->options.threshold},
                  {"threshold_mode",
                   c.files->options.mode == ingest::ThresholdMode::kEqual ? "equal" : "at_least"},
                  {"attribute_cardinality", c.files->options.attribute_cardinality}};
  }
  if (c.dataset_dir) j["dataset_dir"] = c.dataset_dir->string();
  j["split"] = SplitToJson(c.split);
  j["minority_class"] = c.minority_class ? nlohmann::json(*c.minority_class) : nlohmann::json();
  j["setting"] = std::string(SettingName(c.setting));
  j["target_share"] = c.target_share ? nlohmann::json(*c.target_share) : nlohmann::json();
  j["lambda"] = c.lambda;
  j["train"] = trainer::ToJson(c.train);
  j["triplets_per_observation"] = c.triplets_per_observation;
  j["k"] = c.k;
  j["seeds"] = c.seeds;
  j["output_dir"] = c.output_dir.string();
  return j;
}

ExperimentConfig ExperimentConfigFromJson(const nlohmann::json& j) {
  ExperimentConfig c;
  if (j.contains("synth")) c.synth = synthgen::SynthConfigFromJson(j.at("synth"));
  if (j.contains("files")) {
    const nlohmann::json& f = j.at("files");
    FileSource src;
    src.ratings = f.at("ratings").get<std::string>();
    src.providers = f.at("providers").get<std::string>();
    src.attributes = f.at("attributes").get<std::string>();
    src.options.threshold = f.value("threshold", src.options.threshold);
    src.options.mode = f.value("threshold_mode", std::string("at_least")) == "equal"
                           ? ingest::ThresholdMode::kEqual
                           : ingest::ThresholdMode::kAtLeast;
    src.options.attribute_cardinality =
        f.value("attribute_cardinality", src.options.attribute_cardinality);
    c.files = src;
  }
  if (j.contains("dataset_dir")) c.dataset_dir = j.at("dataset_dir").get<std::string>();
  if (j.contains("split")) c.split = SplitFromJson(j.at("split"));
  if (j.contains("minority_class") && !j.at("minority_class").is_null()) {
    c.minority_class = j.at("minority_class").get<AttributeClass>();
  }
  if (j.contains("setting")) c.setting = ParseSetting(j.at("setting").get<std::string>());
  if (j.contains("target_share") && !j.at("target_share").is_null()) {
    c.target_share = j.at("target_share").get<double>();
  }
  c.lambda = j.value("lambda", c.lambda);
  if (j.contains("train")) c.train = trainer::TrainConfigFromJson(j.at("train"));
  c.triplets_per_observation = j.value("triplets_per_observation", c.triplets_per_observation);
  c.k = j.value("k", c.k);
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  return c;
}

}  // namespace fairrank::harness
