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

#ifndef DECBENCH_DEC_SOLVER_HPP_
#define DECBENCH_DEC_SOLVER_HPP_

#include <variant>
#include <vector>

#include "decbench/divergence.hpp"
#include "decbench/matrix_game.hpp"
#include "decbench/model.hpp"
#include "decbench/rng.hpp"

namespace decbench {

enum class DecMode { kPlain, kOptimistic };

using DecisionDistribution = std::vector<double>;
using RandomizedEstimate = std::vector<double>;

// Tables shared by every DEC evaluation on a fixed (class, statistics,
// divergence): f^M(pi), f^M(pi_M), f^psi(pi_psi) and D^pi(psi || M).
class DecInstance {
 public:
  DecInstance(const ModelClass& cls, const StatisticSpace& stats,
              const Divergence& divergence);

  std::size_t num_models() const { return num_models_; }
  std::size_t num_decisions() const { return num_decisions_; }
  std::size_t num_stats() const { return num_stats_; }

  double value(std::size_t model, std::size_t decision) const {
    return model_value_[model * num_decisions_ + decision];
  }
  double model_optimum(std::size_t model) const { return model_opt_[model]; }
  double stat_optimum(std::size_t stat) const { return stat_opt_[stat]; }
  double divergence(std::size_t decision, std::size_t stat,
                    std::size_t model) const {
    return div_[(decision * num_stats_ + stat) * num_models_ + model];
  }

  // Row m, column pi: E_{psi ~ mu}[gain - f^M(pi) - gamma D^pi(psi || M)].
  PayoffMatrix Payoff(const RandomizedEstimate& mu, double gamma,
                      DecMode mode) const;
  double Objective(const DecisionDistribution& p, const RandomizedEstimate& mu,
                   std::size_t model, double gamma, DecMode mode) const;

 private:
  std::size_t num_models_, num_decisions_, num_stats_;
  std::vector<double> model_value_, model_opt_, stat_opt_, div_;
};

void CheckGamma(double gamma, DecMode mode);

double DecObjective(const ModelClass& cls, const StatisticSpace& stats,
                    const DecisionDistribution& p, const RandomizedEstimate& mu,
                    std::size_t model, double gamma, const Divergence& d,
                    DecMode mode);

SaddleResult SolveDec(const DecInstance& instance, const RandomizedEstimate& mu,
                      double gamma, DecMode mode,
                      const SolverOptions& options = {});
SaddleResult SolveDec(const ModelClass& cls, const StatisticSpace& stats,
                      const RandomizedEstimate& mu, double gamma,
                      const Divergence& d, DecMode mode,
                      const SolverOptions& options = {});

struct BruteforceResult {
  double value;
  double slack;  // certified bound on value - true minimum
};
BruteforceResult DecBruteforce(const DecInstance& instance,
                               const RandomizedEstimate& mu, double gamma,
                               DecMode mode, double grid_resolution);

struct OdecEstimate {
  double lower_bound;
  RandomizedEstimate argmax_mu;
  std::size_t probes;
};
OdecEstimate OdecSupEstimate(const DecInstance& instance, double gamma,
                             std::size_t search_budget, Rng& rng,
                             const SolverOptions& options = {});

struct PosteriorSamplingCertificate {};
// Per layer, plays pi_Q w.p. 1 - alpha/H and the estimation policy w.p.
// alpha/H. Empty estimation_policies means on-policy (pi_est = pi_Q).
struct ExplorationMixtureCertificate {
  double alpha = 0.0;
  std::vector<PolicyTable> estimation_policies;
};
// (1 - epsilon) * posterior sampling + epsilon * point mass on `decision`.
struct ForcedExplorationCertificate {
  double epsilon = 0.0;
  std::size_t decision = 0;
};
using Certificate =
    std::variant<PosteriorSamplingCertificate, ExplorationMixtureCertificate,
                 ForcedExplorationCertificate>;

// The decision mixture a certificate induces.
std::vector<std::pair<Decision, double>> CertificateDistribution(
    const ModelClass& cls, const StatisticSpace& stats,
    const RandomizedEstimate& mu, const Certificate& certificate);

// sup_M of the objective at the certificate's p; an upper bound on the DEC
// at mu.
double CertificateValue(const ModelClass& cls, const StatisticSpace& stats,
                        const RandomizedEstimate& mu, double gamma,
                        const Divergence& d, DecMode mode,
                        const Certificate& certificate);

}  // namespace decbench

#endif  // DECBENCH_DEC_SOLVER_HPP_
