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

#ifndef DECBENCH_ESTIMATORS_HPP_
#define DECBENCH_ESTIMATORS_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "decbench/dec_solver.hpp"
#include "decbench/divergence.hpp"
#include "decbench/model.hpp"

namespace decbench {

struct BatchElement {
  std::size_t decision = 0;
  Outcome outcome;
};
using Batch = std::vector<BatchElement>;

// Normalized exp(-x_i), computed with max-subtraction.
std::vector<double> SoftminWeights(const std::vector<double>& x);
// log sum_i exp(x_i).
double LogSumExp(const std::vector<double>& x);

// Exponential weights over a finite set; weights proportional to
// exp(-eta * cumulative loss).
class ExponentialWeights {
 public:
  ExponentialWeights(std::size_t size, double eta);
  std::vector<double> Distribution() const;
  void Update(const std::vector<double>& losses);
  const std::vector<double>& cumulative() const { return cumulative_; }
  double eta() const { return eta_; }

 private:
  double eta_;
  std::vector<double> cumulative_;
};

class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual RandomizedEstimate Predict() const = 0;
  virtual void Update(const Batch& batch) = 0;
  virtual std::string key() const = 0;
  virtual StatisticMode statistic_mode() const = 0;
  // Effective hyperparameters, defaults resolved.
  virtual std::map<std::string, double> hyperparameters() const = 0;
};

// mu(M) proportional to exp(-eta * #disagreements with observed outcomes).
class EwIndicator : public Estimator {
 public:
  EwIndicator(std::shared_ptr<const ModelClass> cls, double eta = 1.0);
  RandomizedEstimate Predict() const override;
  void Update(const Batch& batch) override;
  std::string key() const override { return "ew-indicator"; }
  StatisticMode statistic_mode() const override { return StatisticMode::kModel; }
  std::map<std::string, double> hyperparameters() const override;
  const std::vector<double>& mistakes() const { return weights_.cumulative(); }

 private:
  std::shared_ptr<const ModelClass> cls_;
  std::vector<std::vector<Outcome>> outcomes_;  // [decision][model]
  ExponentialWeights weights_;
};

// mu(M) proportional to exp(-eta (L(f^M) - f^M(pi_M) / gamma)), L the
// cumulative squared prediction error on observed (pi, r).
class EwOptimisticSq : public Estimator {
 public:
  EwOptimisticSq(std::shared_ptr<const ModelClass> cls, double gamma,
                 double eta = 0.5);
  RandomizedEstimate Predict() const override;
  void Update(const Batch& batch) override;
  std::string key() const override { return "ew-opt-sq"; }
  StatisticMode statistic_mode() const override { return StatisticMode::kModel; }
  std::map<std::string, double> hyperparameters() const override;

 private:
  std::shared_ptr<const ModelClass> cls_;
  double gamma_, eta_;
  std::vector<double> squared_loss_, bonus_;
};

struct BilinearParams {
  double gamma = 1.0;
  std::size_t epochs = 1;  // K
  double loss_bound = 2.0;  // L with |l_h| <= L
  double eta = 0.0;         // <= 0 selects the default
};

// Per-layer batch averages (1/n) sum_l l_h(Q; z_h^l).
std::vector<double> BatchDiscrepancy(const QFunction& q, const Batch& batch,
                                     const Discrepancy& discrepancy = nullptr);

class EwOptimisticBilinear : public Estimator {
 public:
  EwOptimisticBilinear(std::shared_ptr<const ModelClass> cls,
                       std::vector<QFunction> qs, BilinearParams params,
                       Discrepancy discrepancy = nullptr);
  RandomizedEstimate Predict() const override;
  void Update(const Batch& batch) override;
  std::string key() const override { return "ew-opt-bilinear"; }
  StatisticMode statistic_mode() const override {
    return StatisticMode::kQFunction;
  }
  std::map<std::string, double> hyperparameters() const override;
  // l^(k)(Q) for a single batch, without updating.
  std::vector<double> EpochLoss(const Batch& batch) const;
  static double DefaultEta(std::size_t num_q, const BilinearParams& params,
                           int horizon);

 private:
  std::shared_ptr<const ModelClass> cls_;
  std::vector<QFunction> qs_;
  BilinearParams params_;
  Discrepancy discrepancy_;
  std::vector<double> value_;
  ExponentialWeights weights_;
};

struct TwoTimescaleParams {
  double gamma = 1.0;
  std::size_t epochs = 1;
  double delta = 0.05;
  double lambda = 0.125;
  double beta = 0.0;  // <= 0 selects 1 / (12 gamma H)
  double eta = 0.0;   // <= 0 selects 1 / (2^16 (log(|Q| K / delta) + 1))
};

class TwoTimescale : public Estimator {
 public:
  TwoTimescale(std::shared_ptr<const ModelClass> cls, std::vector<QFunction> qs,
               TwoTimescaleParams params);
  RandomizedEstimate Predict() const override;
  void Update(const Batch& batch) override;
  std::string key() const override { return "two-timescale"; }
  StatisticMode statistic_mode() const override {
    return StatisticMode::kQFunction;
  }
  std::map<std::string, double> hyperparameters() const override;
  // q^(k)(. | Q_f).
  std::vector<double> InnerDistribution(std::size_t f) const;
  static double DefaultEta(std::size_t num_q, const TwoTimescaleParams& params);

 private:
  std::shared_ptr<const ModelClass> cls_;
  std::vector<QFunction> qs_;
  TwoTimescaleParams params_;
  std::vector<double> inner_;  // [f * |Q| + g]: sum (1/H) sum_h Delta_h(g, f)^2
  std::vector<double> outer_;
};

// Delta_h(g, f) on transition z: g_h(s, a) - r - max_a' f_{h+1}(s', a').
double CrossResidual(int h, const QFunction& g, const QFunction& f,
                     const Transition& z);

// (1/H) sum_h [Delta_h(g, f)^2 - (E[l2 | x] - l2(y))^2] on a batch of H
// trajectories, trajectory h supplying layer h; needs the true model.
double RealizedOffsetLoss(const TabularMdp& truth, const QFunction& g,
                          const QFunction& f, const Batch& batch);

// Harness-side: per-round divergence and optimality-gap terms.
class EstimationLedger {
 public:
  void Record(double divergence_term, double gap_term);
  // sum (divergence + gap / gamma).
  double Total(double gamma) const;
  double divergence_total() const { return divergence_total_; }
  double gap_total() const { return gap_total_; }
  const std::vector<double>& divergence_terms() const { return div_; }
  const std::vector<double>& gap_terms() const { return gap_; }

 private:
  std::vector<double> div_, gap_;
  double divergence_total_ = 0.0, gap_total_ = 0.0;
};

// Exact ledger terms for one round, from DecInstance tables.
std::pair<double, double> LedgerTerms(const DecInstance& instance,
                                      const DecisionDistribution& p,
                                      const RandomizedEstimate& mu,
                                      std::size_t true_model);

}  // namespace decbench

#endif  // DECBENCH_ESTIMATORS_HPP_
