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
#include <limits>
#include <fmt/format.h>
#include <fstream>
#include <numeric>
#include <spdlog/spdlog.h>

#include "fairrank/hash.h"
#include "fairrank/metrics.h"
#include "fairrank/ranking.h"
#include "fairrank/rng.h"
#include "fairrank/trainer.h"

namespace fairrank::trainer {

void TrainConfig::Validate() const {
  if (dim < 1) throw ValidationError("latent dimension must be positive");
  if (batch_size < 1) throw ValidationError("batch_size must be at least 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError(fmt::format("lambda {} outside [0, 1]", lambda));
  }
  if (!(learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
  if (max_epochs < 0) throw ValidationError("max_epochs must be non-negative");
  if (patience < 1) throw ValidationError("patience must be at least 1");
  if (l2_weight < 0.0) throw ValidationError("l2_weight must be non-negative");
  if (!(init_high >= init_low)) throw ValidationError("init_high below init_low");
  if (eval_k < 1) throw ValidationError("eval_k must be at least 1");
}

nlohmann::json ToJson(const TrainConfig& c) {
  return {{"dim", c.dim},
          {"batch_size", c.batch_size},
          {"learning_rate", c.learning_rate},
          {"lambda", c.lambda},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"l2_weight", c.l2_weight},
          {"seed", c.seed},
          {"init_low", c.init_low},
          {"init_high", c.init_high},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"epsilon", c.epsilon},
          {"eval_k", c.eval_k}};
}

TrainConfig TrainConfigFromJson(const nlohmann::json& j) {
  TrainConfig c;
  c.dim = j.value("dim", c.dim);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.lambda = j.value("lambda", c.lambda);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.patience = j.value("patience", c.patience);
  c.l2_weight = j.value("l2_weight", c.l2_weight);
  c.seed = j.value("seed", c.seed);
  c.init_low = j.value("init_low", c.init_low);
  c.init_high = j.value("init_high", c.init_high);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.eval_k = j.value("eval_k", c.eval_k);
  return c;
}

std::string TrainConfig::Hash() const { return HashHex(ToJson(*this).dump()); }

FactorModel InitModel(std::int32_t num_users, std::int32_t num_items,
                      const TrainConfig& config) {
  FactorModel model(num_users, num_items, config.dim);
  Rng rng(config.seed);
  for (double& v : model.user_factors) v = rng.Uniform(config.init_low, config.init_high);
  for (double& v : model.item_factors) v = rng.Uniform(config.init_low, config.init_high);
  return model;
}

void TrainLog::WriteCsv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << "epoch,train_loss,reg_value,val_ndcg,val_dR,degenerate_batches\n";
  for (const EpochLog& e : epochs) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", e.epoch,
                       e.train_loss, e.reg_value, e.val_ndcg, e.val_delta_relevance,
                       e.degenerate_batches);
  }
}

namespace {

void DumpLastGood(const TrainConfig& config, const FactorModel& model) {
  if (config.divergence_checkpoint.empty()) return;
  SaveCheckpoint(config.divergence_checkpoint,
                 {model, config.seed, config.Hash()});
}

}  // namespace

TrainResult Train(const Dataset& train, const Dataset& validation,
                  const sampler::TripletSet& triplets, const TrainConfig& config,
                  const Representations& reprs, const GroupStats& stats) {
  config.Validate();
  if (triplets.triplets.empty()) throw ValidationError("empty triplet set");
  const RegularizerTarget target = RegularizerTarget::From(reprs, stats);
  FactorModel model = InitModel(train.num_users, train.num_items, config);
  AdamOptimizer adam(model, config);
  SparseGradient grad;
  grad.Reset(model.num_users, model.num_items, model.dim);

  const auto exclude = ItemsByUser(train);
  const auto truth = metrics::GroundTruth(validation);
  const bool has_validation = std::any_of(
      truth.begin(), truth.end(), [](const auto& items) { return !items.empty(); });

  Rng shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<sampler::Triplet> batch;
  batch.reserve(config.batch_size);

  TrainResult result;
  result.model = model;
  double best_ndcg = -1.0;
  std::int32_t stale = 0;

  for (std::int32_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.Shuffle(order);
    EpochLog log;
    log.epoch = epoch;
    double loss_sum = 0.0, reg_sum = 0.0;
    std::int64_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      batch.clear();
      for (std::size_t n = start; n < end; ++n) batch.push_back(triplets.triplets[order[n]]);
      const LossBreakdown loss = ComputeGradient(model, batch, target, config.lambda,
                                                 config.l2_weight, grad);
      if (!std::isfinite(loss.total)) {
        DumpLastGood(config, model);
        throw DivergenceError(epoch, batches,
                              fmt::format("non-finite loss at epoch {} batch {}",
                                          epoch, batches));
      }
      if (loss.degenerate) ++log.degenerate_batches;
      adam.Apply(model, grad);
      loss_sum += loss.total;
      reg_sum += loss.regularizer;
      ++batches;
    }
    if (!model.AllFinite()) {
      DumpLastGood(config, result.model);
      throw DivergenceError(epoch, batches,
                            fmt::format("non-finite parameters after epoch {}", epoch));
    }
    log.train_loss = loss_sum / static_cast<double>(batches);
    log.reg_value = reg_sum / static_cast<double>(batches);

    if (has_validation) {
      const RankedLists lists = RankTopK(model, config.eval_k, exclude);
      log.val_ndcg = metrics::NdcgAtK(lists, truth, config.eval_k).value;
      log.val_delta_relevance =
          metrics::DisparateRelevance(lists, reprs, stats.minority_class,
                                      stats.catalog_minority())
              .value;
    } else {
      log.val_ndcg = std::numeric_limits<double>::quiet_NaN();
      log.val_delta_relevance = std::numeric_limits<double>::quiet_NaN();
    }
    result.log.epochs.push_back(log);
    spdlog::debug("epoch {}: loss {:.6f} reg {:.3e} val_ndcg {:.5f} val_dR {:.5f}",
                  epoch, log.train_loss, log.reg_value, log.val_ndcg,
                  log.val_delta_relevance);

    if (!has_validation) {
      result.model = model;
      result.log.best_epoch = epoch;
      continue;
    }
    if (log.val_ndcg > best_ndcg) {
      best_ndcg = log.val_ndcg;
      result.model = model;
      result.log.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= config.patience) {
      result.log.early_stopped = true;
      break;
    }
  }
  return result;
}

}  // namespace fairrank::trainer
