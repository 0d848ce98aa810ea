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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fairrank/core.h"
#include "fairrank/model.h"
#include "fairrank/sampler.h"
#include "json.hpp"

namespace fairrank::trainer {

using sampler::Triplet;

struct TrainConfig {
  std::int32_t dim = 100;
  std::int32_t batch_size = 1024;
  double learning_rate = 0.01;
  double lambda = 0.0;  // weight of the fairness regularizer, in [0, 1]
  std::int32_t max_epochs = 100;
  std::int32_t patience = 5;  // epochs without validation NDCG gain
  double l2_weight = 1e-5;
  std::uint64_t seed = 1;
  double init_low = 0.0;
  double init_high = 1.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int32_t eval_k = 10;
  // Where the last finite model is written if training diverges.
  std::filesystem::path divergence_checkpoint;

  void Validate() const;
  std::string Hash() const;
};

nlohmann::json ToJson(const TrainConfig& config);
TrainConfig TrainConfigFromJson(const nlohmann::json& j);

// Per-item minority share S_i(a_min) and the catalog share it is pulled to.
struct RegularizerTarget {
  std::vector<double> minority_share;
  double catalog_minority = 0.0;

  static RegularizerTarget From(const Representations& reprs,
                                const GroupStats& stats);
};

FactorModel InitModel(std::int32_t num_users, std::int32_t num_items,
                      const TrainConfig& config);

// Mean of -log sigmoid(f(u,i) - f(u,j)) plus l2_weight times the squared norm
// of every distinct row the batch touches.
double PairwiseLoss(const FactorModel& model, std::span<const Triplet> batch,
                    double l2_weight);

struct RegularizerValue {
  double value = 0.0;
  bool degenerate = false;  // |sum of observed scores| < 1e-12, value forced to 0
};

// (sum f(u,i) S_i / sum f(u,i) - C_min)^2 over the observed item of each
// triplet.
RegularizerValue FairnessRegularizer(const FactorModel& model,
                                     std::span<const Triplet> batch,
                                     const RegularizerTarget& target);

struct LossBreakdown {
  double pairwise = 0.0;
  double regularizer = 0.0;
  double total = 0.0;  // (1 - lambda) * pairwise + lambda * regularizer
  bool degenerate = false;
};

LossBreakdown TotalLoss(const FactorModel& model, std::span<const Triplet> batch,
                        const RegularizerTarget& target, double lambda,
                        double l2_weight);

// Gradient rows for the users and items a batch touches.
class SparseGradient {
 public:
  void Reset(std::int32_t num_users, std::int32_t num_items, std::int32_t dim);
  // Zeroed on first access within a batch.
  std::span<double> User(UserId u);
  std::span<double> Item(ItemId i);
  void Clear();

  const std::vector<UserId>& touched_users() const { return users_; }
  const std::vector<ItemId>& touched_items() const { return items_; }
  std::span<const double> UserRow(UserId u) const;
  std::span<const double> ItemRow(ItemId i) const;

 private:
  std::span<double> Slot(std::vector<std::int32_t>& slot_of, std::vector<double>& rows,
                         std::vector<std::int32_t>& order, std::int32_t id);
  std::int32_t dim_ = 0;
  std::vector<std::int32_t> user_slot_, item_slot_;
  std::vector<std::int32_t> users_, items_;
  std::vector<double> user_rows_, item_rows_;
};

// Loss and its gradient with respect to every touched parameter.
LossBreakdown ComputeGradient(const FactorModel& model,
                              std::span<const Triplet> batch,
                              const RegularizerTarget& target, double lambda,
                              double l2_weight, SparseGradient& grad);

// Adam with moments kept for every parameter but advanced only for rows that
// receive a gradient; bias correction uses the global step count.
class AdamOptimizer {
 public:
  AdamOptimizer(const FactorModel& model, const TrainConfig& config);
  void Apply(FactorModel& model, const SparseGradient& grad);
  std::int64_t steps() const { return steps_; }

 private:
  double learning_rate_, beta1_, beta2_, epsilon_;
  std::int64_t steps_ = 0;
  double beta1_power_ = 1.0, beta2_power_ = 1.0;
  std::vector<double> user_m_, user_v_, item_m_, item_v_;
};

struct EpochLog {
  std::int32_t epoch = 0;
  double train_loss = 0.0;
  double reg_value = 0.0;
  double val_ndcg = 0.0;
  double val_delta_relevance = 0.0;
  std::int64_t degenerate_batches = 0;
};

struct TrainLog {
  std::vector<EpochLog> epochs;
  std::int32_t best_epoch = 0;
  bool early_stopped = false;

  void WriteCsv(const std::filesystem::path& path) const;
};

struct TrainResult {
  FactorModel model;  // best validation checkpoint
  TrainLog log;
};

class DivergenceError : public Error {
 public:
  DivergenceError(std::int32_t epoch, std::int64_t batch, const std::string& what)
      : Error(what), epoch_(epoch), batch_(batch) {}
  std::int32_t epoch() const { return epoch_; }
  std::int64_t batch() const { return batch_; }

 private:
  std::int32_t epoch_;
  std::int64_t batch_;
};

// Shuffles the fixed triplet set each epoch, applies Adam per batch and keeps
// the model with the best validation NDCG@eval_k. Without validation
// interactions the last epoch's model is returned.
TrainResult Train(const Dataset& train, const Dataset& validation,
                  const sampler::TripletSet& triplets, const TrainConfig& config,
                  const Representations& reprs, const GroupStats& stats);

struct Checkpoint {
  FactorModel model;
  std::uint64_t seed = 0;
  std::string config_hash;
};

// Versioned little-endian binary dump; scores survive a round trip bit-exactly.
void SaveCheckpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

}  // namespace fairrank::trainer
