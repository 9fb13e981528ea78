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

#include "decbench/decision_rules.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "decbench/errors.hpp"

namespace decbench {

Rule ParseRule(const std::string& key) {
  if (key == "e2d") return Rule::kE2d;
  if (key == "e2d-opt") return Rule::kE2dOpt;
  if (key == "e2d-opt-batched") return Rule::kE2dOptBatched;
  if (key == "posterior-sampling") return Rule::kPosteriorSampling;
  throw ConfigError("unknown rule '" + key +
                    "' (expected e2d, e2d-opt, e2d-opt-batched, posterior-sampling)");
}

std::string RuleKey(Rule rule) {
  switch (rule) {
    case Rule::kE2d: return "e2d";
    case Rule::kE2dOpt: return "e2d-opt";
    case Rule::kE2dOptBatched: return "e2d-opt-batched";
    case Rule::kPosteriorSampling: return "posterior-sampling";
  }
  return "";
}

DecMode ModeOf(Rule rule) {
  return rule == Rule::kE2d ? DecMode::kPlain : DecMode::kOptimistic;
}

void RunConfig::Validate() const {
  if (T == 0) throw ConfigError("T must be a positive integer");
  if (n == 0) throw ConfigError("n must be a positive integer");
  if (T % n != 0) {
    throw ConfigError("T = " + std::to_string(T) +
                      " is not divisible by the batch size n = " +
                      std::to_string(n));
  }
  if (n != 1 && (rule == Rule::kE2d || rule == Rule::kE2dOpt)) {
    throw ConfigError("rule " + RuleKey(rule) + " needs n = 1; use e2d-opt-batched");
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gamma must be finite and non-negative");
  }
  if (gamma == 0.0 && rule != Rule::kE2d) {
    throw ConfigError("gamma = 0 is only allowed for the plain e2d rule");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(solver.tol > 0.0)) throw ConfigError("solver tol must be positive");
  if (solver.max_iters == 0) throw ConfigError("solver max_iters must be positive");
  if (environment.empty()) throw ConfigError("environment key is empty");
}

nlohmann::json RunConfig::ToJson() const {
  nlohmann::json est = {{"key", estimator.key}, {"L", estimator.loss_bound}};
  if (estimator.eta) est["eta"] = *estimator.eta;
  if (estimator.lambda) est["lambda"] = *estimator.lambda;
  if (estimator.beta) est["beta"] = *estimator.beta;
  return {{"name", name},
          {"rule", RuleKey(rule)},
          {"T", T},
          {"n", n},
          {"K", epochs()},
          {"gamma", gamma},
          {"divergence", divergence},
          {"estimator", est},
          {"environment", environment},
          {"true_model", true_model},
          {"seed", seed},
          {"delta", delta},
          {"solver",
           {{"tol", solver.tol},
            {"max_iters", solver.max_iters},
            {"method", solver.method == SaddleMethod::kSimplex
                           ? "simplex"
                           : "multiplicative-weights"},
            {"on_unconverged", warn_unconverged ? "warn" : "abort"}}}};
}

nlohmann::json ExperimentRecord::Summary() const {
  nlohmann::json hp = nlohmann::json::object();
  for (const auto& [k, v] : hyperparameters) hp[k] = v;
  return {{"schema_version", 1},
          {"config", config.ToJson()},
          {"seed", config.seed},
          {"estimator_hyperparameters", hp},
          {"environment", environment_metadata},
          {"regret", regret},
          {"dec_value_sum", dec_value_sum},
          {"ledger",
           {{"divergence_total", divergence_total},
            {"gap_total", gap_total},
            {"total", ledger_total}}},
          {"decomposition",
           {{"bound", decomposition_bound}, {"holds", decomposition_holds}}},
          {"solver",
           {{"max_gap", max_solver_gap},
            {"iterations", solver_iters},
            {"unconverged_epochs", unconverged_epochs}}},
          {"chain_violations", chain_violations},
          {"decision_counts", decision_counts},
          {"realized_disagreement", realized_disagreement}};
}

std::unique_ptr<Estimator> MakeEstimator(const Environment& env,
                                         const RunConfig& config) {
  const EstimatorConfig& e = config.estimator;
  auto need_q = [&]() -> const std::vector<QFunction>& {
    if (!env.q_class) {
      throw ConfigError("estimator " + e.key + " needs an environment with a Q class");
    }
    return *env.q_class;
  };
  if (e.key == "ew-indicator") {
    return std::make_unique<EwIndicator>(env.cls, e.eta.value_or(1.0));
  }
  if (e.key == "ew-opt-sq") {
    if (!(config.gamma > 0.0)) throw DomainError("ew-opt-sq needs gamma > 0");
    return std::make_unique<EwOptimisticSq>(env.cls, config.gamma,
                                            e.eta.value_or(0.5));
  }
  if (e.key == "ew-opt-bilinear") {
    BilinearParams params;
    params.gamma = config.gamma;
    params.epochs = config.epochs();
    params.loss_bound = e.loss_bound;
    params.eta = e.eta.value_or(0.0);
    return std::make_unique<EwOptimisticBilinear>(env.cls, need_q(), params);
  }
  if (e.key == "two-timescale") {
    TwoTimescaleParams params;
    params.gamma = config.gamma;
    params.epochs = config.epochs();
    params.delta = config.delta;
    params.lambda = e.lambda.value_or(0.125);
    params.beta = e.beta.value_or(0.0);
    params.eta = e.eta.value_or(0.0);
    return std::make_unique<TwoTimescale>(env.cls, need_q(), params);
  }
  throw ConfigError("unknown estimator '" + e.key +
                    "' (expected ew-indicator, ew-opt-sq, ew-opt-bilinear, two-timescale)");
}

DecisionDistribution PosteriorPushforward(const StatisticSpace& stats,
                                          const RandomizedEstimate& mu,
                                          std::size_t num_decisions) {
  DecisionDistribution p(num_decisions, 0.0);
  for (std::size_t s = 0; s < stats.size(); ++s) {
    if (mu[s] == 0.0) continue;
    const std::size_t d = stats.GreedyDecision(s);
    if (d == kNoDecision) {
      throw UnsupportedError(
          "posterior sampling: a statistic's greedy decision is outside the decision space");
    }
    p[d] += mu[s];
  }
  return p;
}

namespace {

std::vector<double> ClampedWeights(const DecisionDistribution& p) {
  std::vector<double> w(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) w[i] = std::max(p[i], 0.0);
  return w;
}

ExperimentRecord RunLoop(const Environment& env, const RunConfig& config) {
  config.Validate();
  if (config.true_model >= env.cls->size()) {
    throw DomainError("true model index out of range");
  }
  const Divergence divergence = Divergence::FromKey(config.divergence);
  const DecMode mode = ModeOf(config.rule);
  CheckGamma(config.gamma, mode);
  std::unique_ptr<Estimator> estimator = MakeEstimator(env, config);
  if (estimator->statistic_mode() == StatisticMode::kQFunction &&
      !divergence.accepts_q_functions()) {
    throw ConfigError("divergence " + divergence.key() +
                      " cannot take Q-function estimates from " + estimator->key());
  }
  const StatisticSpace stats = env.Statistics(estimator->statistic_mode());
  const DecInstance instance(*env.cls, stats, divergence);
  const std::size_t m_star = config.true_model;
  const Model& truth = env.cls->model(m_star);
  const auto& decisions = env.cls->decisions();
  const double best = instance.model_optimum(m_star);

  ExperimentRecord rec;
  rec.config = config;
  rec.environment_metadata = env.metadata;
  rec.environment_metadata["key"] = env.key;
  rec.environment_metadata["num_models"] = env.cls->size();
  rec.environment_metadata["num_decisions"] = decisions.size();
  rec.environment_metadata["num_statistics"] = stats.size();
  rec.environment_metadata["true_model_label"] = env.cls->model_label(m_star);
  rec.hyperparameters = estimator->hyperparameters();
  rec.decision_counts.assign(decisions.size(), 0);

  std::vector<std::vector<Outcome>> predicted;  // [decision][model]
  if (env.cls->deterministic() && stats.mode() == StatisticMode::kModel) {
    rec.realized_disagreement = 0.0;
    for (std::size_t d = 0; d < decisions.size(); ++d) {
      predicted.emplace_back();
      for (std::size_t m = 0; m < env.cls->size(); ++m) {
        predicted.back().push_back(DeterministicOutcome(env.cls->model(m), decisions[d]));
      }
    }
  }

  const Rng root(config.seed);
  const std::size_t K = config.epochs();
  std::size_t t = 0;
  double cum = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    EpochRecord ep;
    ep.mu = estimator->Predict();
    if (config.rule == Rule::kPosteriorSampling) {
      ep.p = PosteriorPushforward(stats, ep.mu, decisions.size());
      const PayoffMatrix game = instance.Payoff(ep.mu, config.gamma, mode);
      ep.dec_value = MaxRow(game, ep.p);
    } else {
      SaddleResult res = SolveDec(instance, ep.mu, config.gamma, mode, config.solver);
      ep.p = std::move(res.p);
      ep.dec_value = res.value;
      ep.solver_gap = res.gap;
      ep.solver_iters = res.iterations;
      ep.converged = res.converged;
      if (!res.converged) {
        ++rec.unconverged_epochs;
        if (!config.warn_unconverged) {
          throw UnconvergedError("solve_dec did not converge at epoch " +
                                     std::to_string(k + 1) + " (gap " +
                                     std::to_string(res.gap) + ")",
                                 res.gap);
        }
        std::cerr << "warning: solve_dec unconverged at epoch " << k + 1
                  << ", gap " << res.gap << "\n";
      }
    }
    std::tie(ep.est_div, ep.est_gap) = LedgerTerms(instance, ep.p, ep.mu, m_star);
    ep.chain_lhs = instance.Objective(ep.p, ep.mu, m_star, config.gamma, mode);
    if (ep.chain_lhs > ep.dec_value + config.solver.tol) ++rec.chain_violations;
    for (std::size_t d = 0; d < decisions.size(); ++d) {
      ep.expected_regret += ep.p[d] * (best - instance.value(m_star, d));
    }

    const std::vector<double> weights = ClampedWeights(ep.p);
    const Rng epoch_rng = root.Split(k);
    Batch batch;
    batch.reserve(config.n);
    for (std::size_t l = 0; l < config.n; ++l) {
      Rng rng = epoch_rng.Split(l);
      const std::size_t d = rng.Categorical(weights);
      Outcome outcome = Sample(truth, decisions[d], rng);
      ++rec.decision_counts[d];
      if (!predicted.empty()) {
        for (std::size_t m = 0; m < env.cls->size(); ++m) {
          if (!(predicted[d][m] == outcome)) rec.realized_disagreement += ep.mu[m];
        }
      }
      cum += ep.expected_regret;
      RoundRow row;
      row.t = ++t;
      row.epoch = k + 1;
      row.decision = decisions[d].label;
      row.reward = outcome.reward;
      row.cum_regret = cum;
      row.inst_regret = ep.expected_regret;
      row.est_div = ep.est_div;
      row.est_gap = ep.est_gap;
      row.solver_gap = ep.solver_gap;
      row.solver_iters = ep.solver_iters;
      rec.rows.push_back(std::move(row));
      batch.push_back({d, std::move(outcome)});
    }
    estimator->Update(batch);

    rec.dec_value_sum += ep.dec_value;
    rec.divergence_total += ep.est_div;
    rec.gap_total += ep.est_gap;
    rec.max_solver_gap = std::max(rec.max_solver_gap, ep.solver_gap);
    rec.solver_iters += ep.solver_iters;
    rec.epochs.push_back(std::move(ep));
  }

  const double n = static_cast<double>(config.n);
  rec.regret = cum;
  rec.ledger_total = mode == DecMode::kPlain
                         ? rec.divergence_total
                         : rec.divergence_total + rec.gap_total / config.gamma;
  const double ledger_term = mode == DecMode::kPlain
                                 ? config.gamma * rec.divergence_total
                                 : config.gamma * rec.divergence_total + rec.gap_total;
  rec.decomposition_bound = n * rec.dec_value_sum + n * ledger_term +
                            static_cast<double>(config.T) * config.solver.tol;
  rec.decomposition_holds =
      rec.regret <= rec.decomposition_bound + 1e-9 * (1.0 + std::abs(rec.decomposition_bound));
  return rec;
}

}  // namespace

ExperimentRecord E2dRun(const Environment& env, const RunConfig& config) {
  RunConfig c = config;
  c.rule = Rule::kE2d;
  return RunLoop(env, c);
}

ExperimentRecord E2dOptRun(const Environment& env, const RunConfig& config) {
  RunConfig c = config;
  c.rule = Rule::kE2dOpt;
  return RunLoop(env, c);
}

ExperimentRecord E2dOptBatchedRun(const Environment& env,
                                  const RunConfig& config) {
  RunConfig c = config;
  c.rule = Rule::kE2dOptBatched;
  return RunLoop(env, c);
}

ExperimentRecord PosteriorSamplingRun(const Environment& env,
                                      const RunConfig& config) {
  RunConfig c = config;
  c.rule = Rule::kPosteriorSampling;
  return RunLoop(env, c);
}

ExperimentRecord Run(const Environment& env, const RunConfig& config) {
  return RunLoop(env, config);
}

}  // namespace decbench
