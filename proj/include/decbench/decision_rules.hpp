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

#ifndef DECBENCH_DECISION_RULES_HPP_
#define DECBENCH_DECISION_RULES_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "decbench/dec_solver.hpp"
#include "decbench/environments.hpp"
#include "decbench/estimators.hpp"

namespace decbench {

enum class Rule { kE2d, kE2dOpt, kE2dOptBatched, kPosteriorSampling };

Rule ParseRule(const std::string& key);
std::string RuleKey(Rule rule);

struct EstimatorConfig {
  std::string key = "ew-indicator";
  // Unset fields take the estimator's documented default.
  std::optional<double> eta, lambda, beta;
  double loss_bound = 2.0;
};

struct RunConfig {
  std::string name = "run";
  Rule rule = Rule::kE2dOpt;
  std::size_t T = 0;
  std::size_t n = 1;
  double gamma = 1.0;
  std::string divergence = "hellinger";
  EstimatorConfig estimator;
  std::string environment;
  std::size_t true_model = 0;
  std::uint64_t seed = 1;
  double delta = 0.05;
  SolverOptions solver;
  bool warn_unconverged = false;

  std::size_t epochs() const { return n == 0 ? 0 : T / n; }
  void Validate() const;
  nlohmann::json ToJson() const;
};

struct RoundRow {
  std::size_t t = 0;
  std::size_t epoch = 0;
  std::string decision;
  double reward = 0.0;
  double cum_regret = 0.0;
  double inst_regret = 0.0;
  double est_div = 0.0;
  double est_gap = 0.0;
  double solver_gap = 0.0;
  std::size_t solver_iters = 0;
};

struct EpochRecord {
  DecisionDistribution p;
  RandomizedEstimate mu;
  // solve_dec value, or the objective's sup over models at p for rules that
  // do not call the solver.
  double dec_value = 0.0;
  double expected_regret = 0.0;
  double est_div = 0.0;
  double est_gap = 0.0;
  double solver_gap = 0.0;
  std::size_t solver_iters = 0;
  bool converged = true;
  // Left side of the per-epoch chain, E_{p,mu}[gain - f*(pi)] - gamma E[D].
  double chain_lhs = 0.0;
};

struct ExperimentRecord {
  RunConfig config;
  std::vector<RoundRow> rows;
  std::vector<EpochRecord> epochs;
  std::map<std::string, double> hyperparameters;
  double regret = 0.0;
  double dec_value_sum = 0.0;
  double divergence_total = 0.0;
  double gap_total = 0.0;
  double ledger_total = 0.0;  // divergence + gap / gamma (divergence only for e2d)
  double decomposition_bound = 0.0;
  bool decomposition_holds = false;
  double max_solver_gap = 0.0;
  std::size_t solver_iters = 0;
  std::size_t unconverged_epochs = 0;
  // Epochs where chain_lhs exceeds dec_value + tol.
  std::size_t chain_violations = 0;
  std::vector<std::size_t> decision_counts;
  // sum_t E_{psi ~ mu} 1{o^psi(pi_t) != o_t} on deterministic model
  // classes; -1 when undefined.
  double realized_disagreement = -1.0;
  nlohmann::json environment_metadata;

  nlohmann::json Summary() const;
};

std::unique_ptr<Estimator> MakeEstimator(const Environment& env,
                                         const RunConfig& config);
DecMode ModeOf(Rule rule);

ExperimentRecord Run(const Environment& env, const RunConfig& config);
ExperimentRecord E2dRun(const Environment& env, const RunConfig& config);
ExperimentRecord E2dOptRun(const Environment& env, const RunConfig& config);
ExperimentRecord E2dOptBatchedRun(const Environment& env,
                                  const RunConfig& config);
ExperimentRecord PosteriorSamplingRun(const Environment& env,
                                      const RunConfig& config);

// p(pi) = mu({psi : pi_psi = pi}).
DecisionDistribution PosteriorPushforward(const StatisticSpace& stats,
                                          const RandomizedEstimate& mu,
                                          std::size_t num_decisions);

}  // namespace decbench

#endif  // DECBENCH_DECISION_RULES_HPP_
