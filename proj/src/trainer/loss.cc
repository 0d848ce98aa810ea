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

#include "fairrank/trainer.h"

namespace fairrank::trainer {
namespace {

constexpr double kDegenerateDenominator = 1e-12;

// -log(sigmoid(x)), stable for large |x|.
double NegLogSigmoid(double x) {
  return x >= 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <typename Id>
std::vector<Id> Distinct(std::vector<Id> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

double SquaredNorm(std::span<const double> row) { return simd::Dot(row, row); }

double TouchedSquaredNorm(const FactorModel& model, std::span<const Triplet> batch) {
  std::vector<UserId> users;
  std::vector<ItemId> items;
  users.reserve(batch.size());
  items.reserve(batch.size() * 2);
  for (const Triplet& t : batch) {
    users.push_back(t.user);
    items.push_back(t.positive);
    items.push_back(t.negative);
  }
  double norm = 0.0;
  for (UserId u : Distinct(std::move(users))) norm += SquaredNorm(model.user(u));
  for (ItemId i : Distinct(std::move(items))) norm += SquaredNorm(model.item(i));
  return norm;
}

void CheckBatch(std::span<const Triplet> batch) {
  if (batch.empty()) throw ValidationError("empty training batch");
}

}  // namespace

RegularizerTarget RegularizerTarget::From(const Representations& reprs,
                                          const GroupStats& stats) {
  RegularizerTarget t;
  t.catalog_minority = stats.catalog_minority();
  t.minority_share.reserve(reprs.size());
  for (const auto& r : reprs) t.minority_share.push_back(r.share[stats.minority_class]);
  return t;
}

double PairwiseLoss(const FactorModel& model, std::span<const Triplet> batch,
                    double l2_weight) {
  CheckBatch(batch);
  double sum = 0.0;
  for (const Triplet& t : batch) {
    const double margin = model.Score(t.user, t.positive) - model.Score(t.user, t.negative);
    sum += NegLogSigmoid(margin);
  }
  double loss = sum / static_cast<double>(batch.size());
  if (l2_weight != 0.0) loss += l2_weight * TouchedSquaredNorm(model, batch);
  return loss;
}

RegularizerValue FairnessRegularizer(const FactorModel& model,
                                     std::span<const Triplet> batch,
                                     const RegularizerTarget& target) {
  CheckBatch(batch);
  double num = 0.0, den = 0.0;
  for (const Triplet& t : batch) {
    const double f = model.Score(t.user, t.positive);
    num += f * target.minority_share[t.positive];
    den += f;
  }
  if (std::abs(den) < kDegenerateDenominator) return {0.0, true};
  const double gap = num / den - target.catalog_minority;
  return {gap * gap, false};
}

LossBreakdown TotalLoss(const FactorModel& model, std::span<const Triplet> batch,
                        const RegularizerTarget& target, double lambda,
                        double l2_weight) {
  LossBreakdown out;
  out.pairwise = PairwiseLoss(model, batch, l2_weight);
  const RegularizerValue reg = FairnessRegularizer(model, batch, target);
  out.regularizer = reg.value;
  out.degenerate = reg.degenerate;
  out.total = (1.0 - lambda) * out.pairwise + lambda * out.regularizer;
  return out;
}

void SparseGradient::Reset(std::int32_t num_users, std::int32_t num_items,
                           std::int32_t dim) {
  dim_ = dim;
  user_slot_.assign(num_users, -1);
  item_slot_.assign(num_items, -1);
  users_.clear();
  items_.clear();
  user_rows_.clear();
  item_rows_.clear();
}

std::span<double> SparseGradient::Slot(std::vector<std::int32_t>& slot_of,
                                       std::vector<double>& rows,
                                       std::vector<std::int32_t>& order,
                                       std::int32_t id) {
  std::int32_t slot = slot_of[id];
  if (slot < 0) {
    slot = static_cast<std::int32_t>(order.size());
    slot_of[id] = slot;
    order.push_back(id);
    rows.resize(rows.size() + dim_, 0.0);
  }
  return {rows.data() + static_cast<std::size_t>(slot) * dim_,
          static_cast<std::size_t>(dim_)};
}

std::span<double> SparseGradient::User(UserId u) {
  return Slot(user_slot_, user_rows_, users_, u);
}
std::span<double> SparseGradient::Item(ItemId i) {
  return Slot(item_slot_, item_rows_, items_, i);
}

std::span<const double> SparseGradient::UserRow(UserId u) const {
  return {user_rows_.data() + static_cast<std::size_t>(user_slot_[u]) * dim_,
          static_cast<std::size_t>(dim_)};
}
std::span<const double> SparseGradient::ItemRow(ItemId i) const {
  return {item_rows_.data() + static_cast<std::size_t>(item_slot_[i]) * dim_,
          static_cast<std::size_t>(dim_)};
}

void SparseGradient::Clear() {
  for (UserId u : users_) user_slot_[u] = -1;
  for (ItemId i : items_) item_slot_[i] = -1;
  users_.clear();
  items_.clear();
  user_rows_.clear();
  item_rows_.clear();
}

LossBreakdown ComputeGradient(const FactorModel& model,
                              std::span<const Triplet> batch,
                              const RegularizerTarget& target, double lambda,
                              double l2_weight, SparseGradient& grad) {
  CheckBatch(batch);
  const auto& k = simd::ActiveKernels();
  const auto dim = static_cast<std::size_t>(model.dim);
  const double acc_weight = 1.0 - lambda;
  const double inv_batch = 1.0 / static_cast<double>(batch.size());
  grad.Clear();

  std::vector<double> positive_scores(batch.size());
  double pair_sum = 0.0;
  for (std::size_t n = 0; n < batch.size(); ++n) {
    const Triplet& t = batch[n];
    const double* w = model.user(t.user).data();
    const double* xi = model.item(t.positive).data();
    const double* xj = model.item(t.negative).data();
    const double fi = k.dot(w, xi, dim);
    const double fj = k.dot(w, xj, dim);
    positive_scores[n] = fi;
    const double margin = fi - fj;
    pair_sum += NegLogSigmoid(margin);
    // d/dmargin of -log sigmoid(margin) = -sigmoid(-margin)
    const double g = -Sigmoid(-margin) * inv_batch * acc_weight;
    double* gw = grad.User(t.user).data();
    k.axpy(g, xi, gw, dim);
    k.axpy(-g, xj, gw, dim);
    k.axpy(g, w, grad.Item(t.positive).data(), dim);
    k.axpy(-g, w, grad.Item(t.negative).data(), dim);
  }

  // Squared-norm penalty over every distinct touched row.
  double norm = 0.0;
  const double l2_scale = 2.0 * l2_weight * acc_weight;
  for (UserId u : grad.touched_users()) {
    const auto row = model.user(u);
    norm += k.dot(row.data(), row.data(), dim);
    if (l2_scale != 0.0) k.axpy(l2_scale, row.data(), grad.User(u).data(), dim);
  }
  for (ItemId i : grad.touched_items()) {
    const auto row = model.item(i);
    norm += k.dot(row.data(), row.data(), dim);
    if (l2_scale != 0.0) k.axpy(l2_scale, row.data(), grad.Item(i).data(), dim);
  }

  LossBreakdown out;
  out.pairwise = pair_sum * inv_batch + l2_weight * norm;

  double num = 0.0, den = 0.0;
  for (std::size_t n = 0; n < batch.size(); ++n) {
    num += positive_scores[n] * target.minority_share[batch[n].positive];
    den += positive_scores[n];
  }
  if (std::abs(den) < kDegenerateDenominator) {
    out.degenerate = true;
  } else {
    const double ratio = num / den;
    const double gap = ratio - target.catalog_minority;
    out.regularizer = gap * gap;
    if (lambda != 0.0) {
      // d reg / d f_n = 2 gap (S_n - ratio) / den, by the quotient rule.
      const double coef = lambda * 2.0 * gap / den;
      for (std::size_t n = 0; n < batch.size(); ++n) {
        const Triplet& t = batch[n];
        const double h = coef * (target.minority_share[t.positive] - ratio);
        if (h == 0.0) continue;
        k.axpy(h, model.item(t.positive).data(), grad.User(t.user).data(), dim);
        k.axpy(h, model.user(t.user).data(), grad.Item(t.positive).data(), dim);
      }
    }
  }
  out.total = acc_weight * out.pairwise + lambda * out.regularizer;
  return out;
}

AdamOptimizer::AdamOptimizer(const FactorModel& model, const TrainConfig& config)
    : learning_rate_(config.learning_rate),
      beta1_(config.beta1),
      beta2_(config.beta2),
      epsilon_(config.epsilon),
      user_m_(model.user_factors.size(), 0.0),
      user_v_(model.user_factors.size(), 0.0),
      item_m_(model.item_factors.size(), 0.0),
      item_v_(model.item_factors.size(), 0.0) {}

void AdamOptimizer::Apply(FactorModel& model, const SparseGradient& grad) {
  ++steps_;
  beta1_power_ *= beta1_;
  beta2_power_ *= beta2_;
  const simd::AdamStep step{learning_rate_, beta1_, beta2_, epsilon_,
                            1.0 - beta1_power_, 1.0 - beta2_power_};
  const auto& k = simd::ActiveKernels();
  const auto dim = static_cast<std::size_t>(model.dim);
  for (UserId u : grad.touched_users()) {
    const std::size_t off = static_cast<std::size_t>(u) * dim;
    k.adam_update(model.user_factors.data() + off, user_m_.data() + off,
                  user_v_.data() + off, grad.UserRow(u).data(), dim, step);
  }
  for (ItemId i : grad.touched_items()) {
    const std::size_t off = static_cast<std::size_t>(i) * dim;
    k.adam_update(model.item_factors.data() + off, item_m_.data() + off,
                  item_v_.data() + off, grad.ItemRow(i).data(), dim, step);
  }
}

}  // namespace fairrank::trainer
