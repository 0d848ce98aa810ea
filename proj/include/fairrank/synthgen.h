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
#include <vector>

#include "fairrank/core.h"
#include "json.hpp"

namespace fairrank::synthgen {

// Two-block-model generator settings. catalog_block assigns provider classes
// to items; observation_block picks the class of each sampled interaction.
struct SynthConfig {
  std::int32_t num_users = 3000;
  std::int32_t num_items = 300;
  std::int64_t num_interactions = 120000;
  std::vector<double> catalog_block{0.5, 0.5};
  std::vector<double> observation_block{0.5, 0.5};
  double popularity_scale = 10.0;
  std::uint64_t seed = 42;

  void Validate() const;
};

// Desk scale: 3000 users, 300 items, 120k interactions. The popularity scale
// shrinks in proportion to the catalog.
SynthConfig DeskScale(double catalog_minority, double observation_minority,
                      std::uint64_t seed);
SynthConfig FullScale(double catalog_minority, double observation_minority,
                       std::uint64_t seed);

// Every item gets its own provider. Within a class, the item at list position
// round(|x|) mod |I_a| with x ~ Exponential(|I_a| / scale) is drawn.
// Duplicate (user, item) draws are redrawn.
Dataset Generate(const SynthConfig& config);

// All (L_x, O_y) pairs with x >= y for the given minority fractions.
std::vector<SynthConfig> SweepGrid(const std::vector<double>& values,
                                   const SynthConfig& base = SynthConfig{});

nlohmann::json ToJson(const SynthConfig& config);
SynthConfig SynthConfigFromJson(const nlohmann::json& j);

}  // namespace fairrank::synthgen
