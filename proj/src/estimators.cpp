// Copyright 2026 The decbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "decbench/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decbench/errors.hpp"

namespace decbench {
namespace {

void CheckTrajectories(const Batch& batch, int horizon) {
  for (const auto& e : batch) {
    if (static_cast<int>(e.outcome.trajectory.size()) != horizon) {
      throw DomainError("trajectory length differs from the horizon");
    }
  }
}

}  // namespace

std::vector<double> SoftminWeights(const std::vector<double>& x) {
  const double lo = *std::min_element(x.begin(), x.end());
  std::vector<double> w(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    w[i] = std::exp(lo - x[i]);
    total += w[i];
  }
  for (auto& v : w) v /= total;
  return w;
}

double LogSumExp(const std::vector<double>& x) {
  const double hi = *std::max_element(x.begin(), x.end());
  if (hi == -std::numeric_limits<double>::infinity()) return hi;
  double total = 0.0;
  for (double v : x) total += std::exp(v - hi);
  return hi + std::log(total);
}

ExponentialWeights::ExponentialWeights(std::size_t size, double eta)
    : eta_(eta), cumulative_(size, 0.0) {
  if (size == 0) throw DomainError("exponential weights over an empty set");
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw DomainError("learning rate must be finite and non-negative");
  }
}

std::vector<double> ExponentialWeights::Distribution() const {
  std::vector<double> scaled(cumulative_.size());
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    scaled[i] = eta_ * cumulative_[i];
  }
  return SoftminWeights(scaled);
}

void ExponentialWeights::Update(const std::vector<double>& losses) {
  if (losses.size() != cumulative_.size()) {
    throw DomainError("loss vector has the wrong length");
  }
  for (std::size_t i = 0; i < losses.size(); ++i) cumulative_[i] += losses[i];
}

EwIndicator::EwIndicator(std::shared_ptr<const ModelClass> cls, double eta)
    : cls_(std::move(cls)), weights_(cls_->size(), eta) {
  if (!cls_->deterministic()) {
    throw DomainError("ew-indicator requires a deterministic model class");
  }
  for (const auto& d : cls_->decisions().decisions()) {
    std::vector<Outcome> row;
    for (const auto& m : cls_->models()) row.push_back(DeterministicOutcome(m, d));
    outcomes_.push_back(std::move(row));
  }
}

RandomizedEstimate EwIndicator::Predict() const { return weights_.Distribution(); }

void EwIndicator::Update(const Batch& batch) {
  std::vector<double> loss(cls_->size(), 0.0);
  for (const auto& e : batch) {
    const auto& row = outcomes_.at(e.decision);
    for (std::size_t m = 0; m < row.size(); ++m) {
      if (!(row[m] == e.outcome)) loss[m] += 1.0;
    }
  }
  weights_.Update(loss);
}

std::map<std::string, double> EwIndicator::hyperparameters() const {
  return {{"eta", weights_.eta()}};
}

EwOptimisticSq::EwOptimisticSq(std::shared_ptr<const ModelClass> cls,
                               double gamma, double eta)
    : cls_(std::move(cls)), gamma_(gamma), eta_(eta) {
  if (cls_->is_mdp()) throw UnsupportedError("ew-opt-sq needs a bandit class");
  if (!(gamma > 0.0)) throw DomainError("ew-opt-sq: gamma must be positive");
  if (!(eta >= 0.0)) throw DomainError("ew-opt-sq: eta must be non-negative");
  squared_loss_.assign(cls_->size(), 0.0);
  for (const auto& m : cls_->models()) {
    bonus_.push_back(OptimalValue(m, cls_->decisions()) / gamma_);
  }
}

RandomizedEstimate EwOptimisticSq::Predict() const {
  std::vector<double> x(cls_->size());
  for (std::size_t m = 0; m < x.size(); ++m) {
    x[m] = eta_ * (squared_loss_[m] - bonus_[m]);
  }
  return SoftminWeights(x);
}

void EwOptimisticSq::Update(const Batch& batch) {
  for (const auto& e : batch) {
    const Decision& d = cls_->decisions()[e.decision];
    for (std::size_t m = 0; m < cls_->size(); ++m) {
      const double err = MeanReward(cls_->model(m), d) - e.outcome.reward;
      squared_loss_[m] += err * err;
    }
  }
}

std::map<std::string, double> EwOptimisticSq::hyperparameters() const {
  return {{"eta", eta_}, {"gamma", gamma_}};
}

std::vector<double> BatchDiscrepancy(const QFunction& q, const Batch& batch,
                                     const Discrepancy& discrepancy) {
  const int H = q.horizon();
  CheckTrajectories(batch, H);
  std::vector<double> avg(H, 0.0);
  if (batch.empty()) return avg;
  for (const auto& e : batch) {
    for (int h = 0; h < H; ++h) {
      const Transition& z = e.outcome.trajectory[h];
      avg[h] += discrepancy ? discrepancy(h, q, z) : BellmanResidual(h, q, z);
    }
  }
  for (auto& v : avg) v /= static_cast<double>(batch.size());
  return avg;
}

double EwOptimisticBilinear::DefaultEta(std::size_t num_q,
                                        const BilinearParams& params,
                                        int horizon) {
  const double alpha = 1.0 / (8.0 * params.gamma);
  const double r = horizon * params.loss_bound * params.loss_bound + alpha;
  const double k = static_cast<double>(std::max<std::size_t>(params.epochs, 1));
  const double rate =
      std::sqrt(std::log(static_cast<double>(num_q)) / (alpha * alpha * k));
  return std::min(rate, 1.0 / (16.0 * r));
}

EwOptimisticBilinear::EwOptimisticBilinear(
    std::shared_ptr<const ModelClass> cls, std::vector<QFunction> qs,
    BilinearParams params, Discrepancy discrepancy)
    : cls_(std::move(cls)),
      qs_(std::move(qs)),
      params_(params),
      discrepancy_(std::move(discrepancy)),
      weights_(qs_.empty() ? 1 : qs_.size(),
               params.eta > 0.0
                   ? params.eta
                   : DefaultEta(qs_.size(), params, cls_->horizon())) {
  if (!cls_->is_mdp()) throw UnsupportedError("ew-opt-bilinear needs an MDP class");
  if (qs_.empty()) throw DomainError("ew-opt-bilinear: empty Q class");
  if (!(params_.gamma > 0.0)) throw DomainError("gamma must be positive");
  if (!(params_.loss_bound >= 1.0)) throw DomainError("loss bound L must be >= 1");
  params_.eta = weights_.eta();
  for (const auto& q : qs_) value_.push_back(q.OptimalValue(cls_->initial()));
}

RandomizedEstimate EwOptimisticBilinear::Predict() const {
  return weights_.Distribution();
}

std::vector<double> EwOptimisticBilinear::EpochLoss(const Batch& batch) const {
  if (batch.empty()) throw DomainError("ew-opt-bilinear: empty batch");
  std::vector<double> loss(qs_.size());
  for (std::size_t i = 0; i < qs_.size(); ++i) {
    double sq = 0.0;
    for (double e : BatchDiscrepancy(qs_[i], batch, discrepancy_)) sq += e * e;
    loss[i] = sq - value_[i] / (8.0 * params_.gamma);
  }
  return loss;
}

void EwOptimisticBilinear::Update(const Batch& batch) {
  weights_.Update(EpochLoss(batch));
}

std::map<std::string, double> EwOptimisticBilinear::hyperparameters() const {
  return {{"eta", params_.eta},
          {"gamma", params_.gamma},
          {"L", params_.loss_bound},
          {"K", static_cast<double>(params_.epochs)}};
}

double CrossResidual(int h, const QFunction& g, const QFunction& f,
                     const Transition& z) {
  const double next = z.next_state < 0 ? 0.0 : f.MaxValue(h + 1, z.next_state);
  return g(h, z.state, z.action) - (z.reward + next);
}

double TwoTimescale::DefaultEta(std::size_t num_q,
                                const TwoTimescaleParams& params) {
  const double k = static_cast<double>(std::max<std::size_t>(params.epochs, 1));
  return 1.0 / (65536.0 *
                (std::log(static_cast<double>(num_q) * k / params.delta) + 1.0));
}

TwoTimescale::TwoTimescale(std::shared_ptr<const ModelClass> cls,
                           std::vector<QFunction> qs, TwoTimescaleParams params)
    : cls_(std::move(cls)), qs_(std::move(qs)), params_(params) {
  if (!cls_->is_mdp()) throw UnsupportedError("two-timescale needs an MDP class");
  if (qs_.empty()) throw DomainError("two-timescale: empty Q class");
  for (const auto& q : qs_) {
    if (!q.InUnitInterval()) {
      throw DomainError("two-timescale: Q values must lie in [0, 1]");
    }
  }
  if (!(params_.gamma > 0.0)) throw DomainError("gamma must be positive");
  if (!(params_.lambda > 0.0)) throw DomainError("lambda must be positive");
  if (!(params_.delta > 0.0 && params_.delta < 1.0)) {
    throw DomainError("delta must lie in (0, 1)");
  }
  if (params_.beta <= 0.0) {
    params_.beta = 1.0 / (12.0 * params_.gamma * cls_->horizon());
  }
  if (params_.eta <= 0.0) params_.eta = DefaultEta(qs_.size(), params_);
  inner_.assign(qs_.size() * qs_.size(), 0.0);
  outer_.assign(qs_.size(), 0.0);
}

RandomizedEstimate TwoTimescale::Predict() const {
  std::vector<double> x(outer_.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = params_.eta * outer_[i];
  return SoftminWeights(x);
}

std::vector<double> TwoTimescale::InnerDistribution(std::size_t f) const {
  const std::size_t n = qs_.size();
  std::vector<double> x(n);
  for (std::size_t g = 0; g < n; ++g) x[g] = params_.lambda * inner_[f * n + g];
  return SoftminWeights(x);
}

void TwoTimescale::Update(const Batch& batch) {
  const int H = cls_->horizon();
  if (static_cast<int>(batch.size()) != H) {
    throw DomainError("two-timescale requires exactly H trajectories per batch");
  }
  CheckTrajectories(batch, H);
  const std::size_t n = qs_.size();
  const double lambda = params_.lambda;
  // delta2[g * n + f] = (1/H) sum_h Delta_h(g, f)^2, trajectory h at layer h.
  std::vector<double> delta2(n * n, 0.0);
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t f = 0; f < n; ++f) {
      double total = 0.0;
      for (int h = 0; h < H; ++h) {
        const double d =
            CrossResidual(h, qs_[g], qs_[f], batch[h].outcome.trajectory[h]);
        total += d * d;
      }
      delta2[g * n + f] = total / H;
    }
  }
  std::vector<double> with_batch(n), prior(n);
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = 0; g < n; ++g) {
      prior[g] = -lambda * inner_[f * n + g];
      with_batch[g] = prior[g] - lambda * delta2[g * n + f];
    }
    const double log_partition = (LogSumExp(with_batch) - LogSumExp(prior)) / lambda;
    double bonus = 0.0;
    for (int h = 0; h < H; ++h) {
      bonus += qs_[f].MaxValue(0, batch[h].outcome.trajectory[0].state);
    }
    bonus *= params_.beta / H;
    outer_[f] += delta2[f * n + f] + log_partition - bonus;
  }
  for (std::size_t f = 0; f < n; ++f) {
    for (std::size_t g = 0; g < n; ++g) inner_[f * n + g] += delta2[g * n + f];
  }
}

std::map<std::string, double> TwoTimescale::hyperparameters() const {
  return {{"eta", params_.eta},
          {"lambda", params_.lambda},
          {"beta", params_.beta},
          {"gamma", params_.gamma},
          {"delta", params_.delta},
          {"K", static_cast<double>(params_.epochs)}};
}

double RealizedOffsetLoss(const TabularMdp& truth, const QFunction& g,
                          const QFunction& f, const Batch& batch) {
  const int H = truth.horizon();
  if (static_cast<int>(batch.size()) != H) {
    throw DomainError("offset loss needs exactly H trajectories");
  }
  CheckTrajectories(batch, H);
  const int S = truth.num_states();
  double total = 0.0;
  for (int h = 0; h < H; ++h) {
    const Transition& z = batch[h].outcome.trajectory[h];
    const double next = z.next_state < 0 ? 0.0 : f.MaxValue(h + 1, z.next_state);
    const double l2 = z.reward + next;
    double conditional = truth.R(h, z.state, z.action);
    if (h + 1 < H) {
      const double* row = truth.Row(h, z.state, z.action);
      for (int s = 0; s < S; ++s) {
        if (row[s] != 0.0) conditional += row[s] * f.MaxValue(h + 1, s);
      }
    }
    const double d = CrossResidual(h, g, f, z);
    const double noise = conditional - l2;
    total += d * d - noise * noise;
  }
  return total / H;
}

void EstimationLedger::Record(double divergence_term, double gap_term) {
  div_.push_back(divergence_term);
  gap_.push_back(gap_term);
  divergence_total_ += divergence_term;
  gap_total_ += gap_term;
}

double EstimationLedger::Total(double gamma) const {
  return divergence_total_ + gap_total_ / gamma;
}

std::pair<double, double> LedgerTerms(const DecInstance& instance,
                                      const DecisionDistribution& p,
                                      const RandomizedEstimate& mu,
                                      std::size_t true_model) {
  double div = 0.0;
  for (std::size_t d = 0; d < instance.num_decisions(); ++d) {
    if (p[d] == 0.0) continue;
    for (std::size_t s = 0; s < instance.num_stats(); ++s) {
      if (mu[s] != 0.0) {
        div += p[d] * mu[s] * instance.divergence(d, s, true_model);
      }
    }
  }
  double gap = 0.0;
  const double best = instance.model_optimum(true_model);
  for (std::size_t s = 0; s < instance.num_stats(); ++s) {
    gap += mu[s] * (best - instance.stat_optimum(s));
  }
  return {div, gap};
}

}  // namespace decbench
