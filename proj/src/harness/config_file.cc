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


#include <boost/algorithm/string/trim.hpp>
#include <boost/lexical_cast.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <sstream>
#include <string>

#include "fairrank/harness.h"
#include "fmt/format.h"
#include "spdlog/spdlog.h"

namespace fairrank::harness {
namespace {

template <typename T>
T Parse(std::string_view key, const std::string& value) {
  try {
    return boost::lexical_cast<T>(boost::algorithm::trim_copy(value));
  } catch (const boost::bad_lexical_cast&) {
    throw UsageError(fmt::format("bad value '{}' for {}", value, key));
  }
}

bool ParseBool(std::string_view key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw UsageError(fmt::format("bad boolean '{}' for {}", value, key));
}

std::vector<std::uint64_t> ParseSeeds(const std::string& value) {
  std::vector<std::uint64_t> seeds;
  std::stringstream in(value);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (!token.empty()) seeds.push_back(Parse<std::uint64_t>("experiment.seeds", token));
  }
  return seeds;
}

synthgen::SynthConfig& Synth(ExperimentConfig& c) {
  if (!c.synth) c.synth = synthgen::DeskScale(0.5, 0.5, 42);
  c.files.reset();
  c.dataset_dir.reset();
  return *c.synth;
}

FileSource& Files(ExperimentConfig& c) {
  if (!c.files) c.files = FileSource{};
  c.synth.reset();
  c.dataset_dir.reset();
  return *c.files;
}

// Two-class block vector with the given minority (class 0) fraction.
std::vector<double> Block(double minority) { return {minority, 1.0 - minority}; }

void SetData(ExperimentConfig& c, const std::string& key, const std::string& v) {
  const std::string full = "data." + key;
  if (key == "source") {
    if (v == "synth") {
      Synth(c);
    } else if (v == "files") {
      Files(c);
    } else if (v == "dataset") {
      if (!c.dataset_dir) c.dataset_dir = std::filesystem::path{};
      c.synth.reset();
      c.files.reset();
    } else {
      throw UsageError(fmt::format("unknown data source '{}'", v));
    }
  } else if (key == "catalog_minority") {
    Synth(c).catalog_block = Block(Parse<double>(full, v));
  } else if (key == "observation_minority") {
    Synth(c).observation_block = Block(Parse<double>(full, v));
  } else if (key == "users") {
    Synth(c).num_users = Parse<std::int32_t>(full, v);
  } else if (key == "items") {
    Synth(c).num_items = Parse<std::int32_t>(full, v);
  } else if (key == "interactions") {
    Synth(c).num_interactions = Parse<std::int64_t>(full, v);
  } else if (key == "popularity_scale") {
    Synth(c).popularity_scale = Parse<double>(full, v);
  } else if (key == "seed") {
    Synth(c).seed = Parse<std::uint64_t>(full, v);
  } else if (key == "full_scale") {
    if (ParseBool(full, v)) {
      synthgen::SynthConfig& s = Synth(c);
      synthgen::SynthConfig full =
          synthgen::FullScale(s.catalog_block[0], s.observation_block[0], s.seed);
      s = full;
      spdlog::warn("full scale selected: generation and training take far longer");
    }
  } else if (key == "ratings") {
    Files(c).ratings = v;
  } else if (key == "providers") {
    Files(c).providers = v;
  } else if (key == "attributes") {
    Files(c).attributes = v;
  } else if (key == "threshold") {
    Files(c).options.threshold = Parse<double>(full, v);
  } else if (key == "threshold_mode") {
    if (v == "at_least") {
      Files(c).options.mode = ingest::ThresholdMode::kAtLeast;
    } else if (v == "equal") {
      Files(c).options.mode = ingest::ThresholdMode::kEqual;
    } else {
      throw UsageError(fmt::format("unknown threshold mode '{}'", v));
    }
  } else if (key == "attribute_cardinality") {
    Files(c).options.attribute_cardinality = Parse<std::int32_t>(full, v);
  } else if (key == "dir") {
    c.dataset_dir = v;
    c.synth.reset();
    c.files.reset();
  } else if (key == "minority_class") {
    c.minority_class = Parse<AttributeClass>(full, v);
  } else {
    throw UsageError(fmt::format("unknown key {}", full));
  }
}

void SetSplit(ExperimentConfig& c, const std::string& key, const std::string& v) {
  const std::string full = "split." + key;
  if (key == "mode") {
    if (v == "temporal") {
      c.split.mode = ingest::SplitMode::kTemporal;
    } else if (v == "random") {
      c.split.mode = ingest::SplitMode::kRandom;
    } else {
      throw UsageError(fmt::format("unknown split mode '{}'", v));
    }
  } else if (key == "train") {
    c.split.train = Parse<double>(full, v);
  } else if (key == "validation") {
    c.split.validation = Parse<double>(full, v);
  } else if (key == "test") {
    c.split.test = Parse<double>(full, v);
  } else if (key == "seed") {
    c.split.seed = Parse<std::uint64_t>(full, v);
  } else if (key == "min_history") {
    c.split.min_history = Parse<std::int32_t>(full, v);
  } else {
    throw UsageError(fmt::format("unknown key {}", full));
  }
}

void SetExperiment(ExperimentConfig& c, const std::string& key, const std::string& v) {
  const std::string full = "experiment." + key;
  if (key == "setting") {
    c.setting = ParseSetting(v);
  } else if (key == "target_share") {
    c.target_share = Parse<double>(full, v);
  } else if (key == "lambda") {
    c.lambda = Parse<double>(full, v);
  } else if (key == "k") {
    c.k = Parse<std::int32_t>(full, v);
  } else if (key == "triplets_per_observation") {
    c.triplets_per_observation = Parse<std::int32_t>(full, v);
  } else if (key == "seeds") {
    c.seeds = ParseSeeds(v);
  } else if (key == "output_dir") {
    c.output_dir = v;
  } else {
    throw UsageError(fmt::format("unknown key {}", full));
  }
}

void SetTrain(ExperimentConfig& c, const std::string& key, const std::string& v) {
  const std::string full = "train." + key;
  trainer::TrainConfig& t = c.train;
  if (key == "dim") {
    t.dim = Parse<std::int32_t>(full, v);
  } else if (key == "batch_size") {
    t.batch_size = Parse<std::int32_t>(full, v);
  } else if (key == "learning_rate") {
    t.learning_rate = Parse<double>(full, v);
  } else if (key == "max_epochs") {
    t.max_epochs = Parse<std::int32_t>(full, v);
  } else if (key == "patience") {
    t.patience = Parse<std::int32_t>(full, v);
  } else if (key == "l2_weight") {
    t.l2_weight = Parse<double>(full, v);
  } else if (key == "init_low") {
    t.init_low = Parse<double>(full, v);
  } else if (key == "init_high") {
    t.init_high = Parse<double>(full, v);
  } else if (key == "beta1") {
    t.beta1 = Parse<double>(full, v);
  } else if (key == "beta2") {
    t.beta2 = Parse<double>(full, v);
  } else if (key == "epsilon") {
    t.epsilon = Parse<double>(full, v);
  } else if (key == "eval_k") {
    t.eval_k = Parse<std::int32_t>(full, v);
  } else {
    throw UsageError(fmt::format("unknown key {}", full));
  }
}

void Set(ExperimentConfig& c, const std::string& section, const std::string& key,
         const std::string& value) {
  if (section == "data") {
    SetData(c, key, value);
  } else if (section == "split") {
    SetSplit(c, key, value);
  } else if (section == "experiment") {
    SetExperiment(c, key, value);
  } else if (section == "train") {
    SetTrain(c, key, value);
  } else {
    throw UsageError(fmt::format("unknown config section [{}]", section));
  }
}

}  // namespace

ExperimentConfig LoadConfigFile(const std::filesystem::path& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError(e.what());
  }
  ExperimentConfig config;
  // The source key goes first so later keys land on the chosen source.
  for (const auto& [section, body] : tree) {
    if (section != "data") continue;
    if (auto source = body.get_optional<std::string>("source")) {
      Set(config, section, "source", *source);
    }
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw UsageError(fmt::format("'{}' is outside a section", section));
    for (const auto& [key, value] : body) {
      if (section == "data" && key == "source") continue;
      Set(config, section, key, value.data());
    }
  }
  return config;
}

void ApplyOverride(ExperimentConfig& config, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  const std::size_t dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq) {
    throw UsageError(fmt::format("override '{}' is not section.key=value", assignment));
  }
  Set(config, std::string(assignment.substr(0, dot)),
      std::string(assignment.substr(dot + 1, eq - dot - 1)),
      std::string(assignment.substr(eq + 1)));
}

}  // namespace fairrank::harness
