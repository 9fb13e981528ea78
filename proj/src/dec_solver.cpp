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

#include "decbench/dec_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "decbench/errors.hpp"

namespace decbench {
namespace {

bool NeedsQ(const Divergence& d) {
  return d.kind() == DivergenceKind::kBilinear ||
         d.kind() == DivergenceKind::kSbe;
}

// Statistics as the divergence consumes them: models become Q* for the
// Q-statistic divergences so backward induction runs once per model.
std::vector<SufficientStatistic> EvaluationStats(const StatisticSpace& stats,
                                                 const Divergence& d) {
  std::vector<SufficientStatistic> out;
  for (std::size_t s = 0; s < stats.size(); ++s) {
    const auto* model = std::get_if<Model>(&stats[s]);
    if (model != nullptr && NeedsQ(d) && IsMdp(*model)) {
      out.emplace_back(OptimalQ(std::get<TabularMdp>(*model)));
    } else {
      out.push_back(stats[s]);
    }
  }
  return out;
}

void CheckEstimate(const RandomizedEstimate& mu, std::size_t size) {
  if (mu.size() != size) {
    throw DomainError("randomized estimate has " + std::to_string(mu.size()) +
                      " entries, expected " + std::to_string(size));
  }
  double total = 0.0;
  for (double x : mu) {
    if (!(x >= 0.0)) throw DomainError("randomized estimate: negative mass");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw DomainError("randomized estimate does not sum to 1");
  }
}

bool SameDecision(const Decision& a, const Decision& b) {
  if (a.policy && b.policy) return *a.policy == *b.policy;
  return !a.policy && !b.policy && a.arm == b.arm;
}

void AddMass(std::vector<std::pair<Decision, double>>& dist,
             const Decision& d, double w) {
  if (w == 0.0) return;
  for (auto& [existing, mass] : dist) {
    if (SameDecision(existing, d)) {
      mass += w;
      return;
    }
  }
  dist.emplace_back(d, w);
}

}  // namespace

void CheckGamma(double gamma, DecMode mode) {
  if (!std::isfinite(gamma) || gamma < 0.0 ||
      (gamma == 0.0 && mode == DecMode::kOptimistic)) {
    throw DomainError("gamma must be positive (zero allowed in plain mode)");
  }
}

DecInstance::DecInstance(const ModelClass& cls, const StatisticSpace& stats,
                         const Divergence& divergence)
    : num_models_(cls.size()),
      num_decisions_(cls.decisions().size()),
      num_stats_(stats.size()) {
  if (stats.mode() == StatisticMode::kQFunction &&
      !divergence.accepts_q_functions()) {
    throw UnsupportedError("divergence '" + divergence.key() +
                           "' does not accept Q-function statistics");
  }
  const auto& decisions = cls.decisions();
  model_value_.resize(num_models_ * num_decisions_);
  for (std::size_t m = 0; m < num_models_; ++m) {
    for (std::size_t d = 0; d < num_decisions_; ++d) {
      model_value_[m * num_decisions_ + d] = MeanReward(cls.model(m), decisions[d]);
    }
    model_opt_.push_back(*std::max_element(
        model_value_.begin() + m * num_decisions_,
        model_value_.begin() + (m + 1) * num_decisions_));
  }
  for (std::size_t s = 0; s < num_stats_; ++s) {
    stat_opt_.push_back(stats.OptimalValue(s));
  }
  div_.resize(num_decisions_ * num_stats_ * num_models_);
  const bool fast_hellinger =
      divergence.kind() == DivergenceKind::kHellinger &&
      stats.mode() == StatisticMode::kModel && cls.deterministic();
  if (fast_hellinger) {
    // Deterministic laws: 2 * 1{outcomes differ}, symmetric so flips agree.
    for (std::size_t d = 0; d < num_decisions_; ++d) {
      std::vector<Outcome> outcome_m, outcome_s;
      for (std::size_t m = 0; m < num_models_; ++m) {
        outcome_m.push_back(DeterministicOutcome(cls.model(m), decisions[d]));
      }
      for (std::size_t s = 0; s < num_stats_; ++s) {
        outcome_s.push_back(
            DeterministicOutcome(std::get<Model>(stats[s]), decisions[d]));
      }
      for (std::size_t s = 0; s < num_stats_; ++s) {
        for (std::size_t m = 0; m < num_models_; ++m) {
          div_[(d * num_stats_ + s) * num_models_ + m] =
              outcome_s[s] == outcome_m[m] ? 0.0 : 2.0;
        }
      }
    }
    return;
  }
  const auto eval = EvaluationStats(stats, divergence);
  for (std::size_t d = 0; d < num_decisions_; ++d) {
    for (std::size_t s = 0; s < num_stats_; ++s) {
      for (std::size_t m = 0; m < num_models_; ++m) {
        div_[(d * num_stats_ + s) * num_models_ + m] =
            divergence(decisions[d], eval[s], cls.model(m));
      }
    }
  }
}

PayoffMatrix DecInstance::Payoff(const RandomizedEstimate& mu, double gamma,
                                 DecMode mode) const {
  CheckGamma(gamma, mode);
  CheckEstimate(mu, num_stats_);
  PayoffMatrix game;
  game.rows = num_models_;
  game.cols = num_decisions_;
  game.a.assign(num_models_ * num_decisions_, 0.0);
  double optimistic_gain = 0.0;
  for (std::size_t s = 0; s < num_stats_; ++s) optimistic_gain += mu[s] * stat_opt_[s];
  for (std::size_t d = 0; d < num_decisions_; ++d) {
    std::vector<double> expected_div(num_models_, 0.0);
    for (std::size_t s = 0; s < num_stats_; ++s) {
      if (mu[s] == 0.0) continue;
      const double* row = &div_[(d * num_stats_ + s) * num_models_];
      for (std::size_t m = 0; m < num_models_; ++m) {
        expected_div[m] += mu[s] * row[m];
      }
    }
    for (std::size_t m = 0; m < num_models_; ++m) {
      const double gain =
          mode == DecMode::kOptimistic ? optimistic_gain : model_opt_[m];
      game.a[m * num_decisions_ + d] =
          gain - value(m, d) - gamma * expected_div[m];
    }
  }
  return game;
}

double DecInstance::Objective(const DecisionDistribution& p,
                              const RandomizedEstimate& mu, std::size_t model,
                              double gamma, DecMode mode) const {
  if (p.size() != num_decisions_) {
    throw DomainError("decision distribution has the wrong length");
  }
  const PayoffMatrix game = Payoff(mu, gamma, mode);
  double v = 0.0;
  for (std::size_t d = 0; d < num_decisions_; ++d) v += p[d] * game(model, d);
  return v;
}

double DecObjective(const ModelClass& cls, const StatisticSpace& stats,
                    const DecisionDistribution& p, const RandomizedEstimate& mu,
                    std::size_t model, double gamma, const Divergence& d,
                    DecMode mode) {
  return DecInstance(cls, stats, d).Objective(p, mu, model, gamma, mode);
}

SaddleResult SolveDec(const DecInstance& instance, const RandomizedEstimate& mu,
                      double gamma, DecMode mode, const SolverOptions& options) {
  return SolveMatrixGame(instance.Payoff(mu, gamma, mode), options);
}

SaddleResult SolveDec(const ModelClass& cls, const StatisticSpace& stats,
                      const RandomizedEstimate& mu, double gamma,
                      const Divergence& d, DecMode mode,
                      const SolverOptions& options) {
  return SolveDec(DecInstance(cls, stats, d), mu, gamma, mode, options);
}

BruteforceResult DecBruteforce(const DecInstance& instance,
                               const RandomizedEstimate& mu, double gamma,
                               DecMode mode, double grid_resolution) {
  if (instance.num_decisions() > 4) {
    throw DomainError("dec_bruteforce refuses more than 4 decisions");
  }
  const PayoffMatrix game = instance.Payoff(mu, gamma, mode);
  return {GridMinimum(game, grid_resolution), GridSlack(game, grid_resolution)};
}

OdecEstimate OdecSupEstimate(const DecInstance& instance, double gamma,
                             std::size_t search_budget, Rng& rng,
                             const SolverOptions& options) {
  const std::size_t n = instance.num_stats();
  OdecEstimate best{-std::numeric_limits<double>::infinity(), {}, 0};
  auto probe = [&](const RandomizedEstimate& mu) {
    const SaddleResult r = SolveDec(instance, mu, gamma, DecMode::kOptimistic,
                                    options);
    ++best.probes;
    if (r.lower_bound > best.lower_bound) {
      best.lower_bound = r.lower_bound;
      best.argmax_mu = mu;
    }
  };
  for (std::size_t s = 0; s < n; ++s) {
    RandomizedEstimate mu(n, 0.0);
    mu[s] = 1.0;
    probe(mu);
  }
  for (std::size_t k = 0; k < search_budget; ++k) probe(rng.Dirichlet(n, 1.0));
  return best;
}

std::vector<std::pair<Decision, double>> CertificateDistribution(
    const ModelClass& cls, const StatisticSpace& stats,
    const RandomizedEstimate& mu, const Certificate& certificate) {
  CheckEstimate(mu, stats.size());
  std::vector<std::pair<Decision, double>> dist;
  if (std::holds_alternative<PosteriorSamplingCertificate>(certificate)) {
    for (std::size_t s = 0; s < stats.size(); ++s) {
      AddMass(dist, stats.GreedyDecisionObject(s), mu[s]);
    }
    return dist;
  }
  if (const auto* c = std::get_if<ForcedExplorationCertificate>(&certificate)) {
    if (!(c->epsilon >= 0.0 && c->epsilon <= 1.0)) {
      throw DomainError("forced exploration weight must lie in [0, 1]");
    }
    if (c->decision >= cls.decisions().size()) {
      throw DomainError("forced exploration decision out of range");
    }
    for (std::size_t s = 0; s < stats.size(); ++s) {
      AddMass(dist, stats.GreedyDecisionObject(s), (1.0 - c->epsilon) * mu[s]);
    }
    AddMass(dist, cls.decisions()[c->decision], c->epsilon);
    return dist;
  }
  const auto& c = std::get<ExplorationMixtureCertificate>(certificate);
  if (!(c.alpha >= 0.0 && c.alpha <= 0.5)) {
    throw DomainError("exploration mixture requires alpha in [0, 1/2]");
  }
  if (!cls.is_mdp()) {
    throw DomainError("exploration mixture needs an MDP decision space");
  }
  if (!c.estimation_policies.empty() &&
      c.estimation_policies.size() != stats.size()) {
    throw DomainError("one estimation policy per statistic required");
  }
  const int H = cls.horizon(), S = cls.num_states();
  const double explore = c.alpha / H;
  for (std::size_t s = 0; s < stats.size(); ++s) {
    if (mu[s] == 0.0) continue;
    const PolicyTable& own = *stats.GreedyDecisionObject(s).policy;
    const PolicyTable& est =
        c.estimation_policies.empty() ? own : c.estimation_policies[s];
    if (est == own || explore == 0.0) {
      AddMass(dist, stats.GreedyDecisionObject(s), mu[s]);
      continue;
    }
    for (unsigned mask = 0; mask < (1u << H); ++mask) {
      std::vector<int> actions(static_cast<std::size_t>(H) * S);
      double w = mu[s];
      for (int h = 0; h < H; ++h) {
        const bool use_est = (mask >> h) & 1u;
        w *= use_est ? explore : 1.0 - explore;
        for (int x = 0; x < S; ++x) {
          actions[h * S + x] = use_est ? est.Action(h, x) : own.Action(h, x);
        }
      }
      PolicyTable mixed(H, S, std::move(actions));
      const std::size_t idx = cls.decisions().IndexOf(mixed);
      AddMass(dist,
              idx != kNoDecision ? cls.decisions()[idx]
                                 : Decision{"mixed", -1, std::move(mixed)},
              w);
    }
  }
  return dist;
}

double CertificateValue(const ModelClass& cls, const StatisticSpace& stats,
                        const RandomizedEstimate& mu, double gamma,
                        const Divergence& d, DecMode mode,
                        const Certificate& certificate) {
  CheckGamma(gamma, mode);
  const auto dist = CertificateDistribution(cls, stats, mu, certificate);
  const auto eval = EvaluationStats(stats, d);
  double optimistic_gain = 0.0;
  for (std::size_t s = 0; s < stats.size(); ++s) {
    optimistic_gain += mu[s] * stats.OptimalValue(s);
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < cls.size(); ++m) {
    const Model& model = cls.model(m);
    const double gain = mode == DecMode::kOptimistic
                            ? optimistic_gain
                            : OptimalValue(model, cls.decisions());
    double v = 0.0;
    for (const auto& [pi, w] : dist) {
      double expected_div = 0.0;
      for (std::size_t s = 0; s < stats.size(); ++s) {
        if (mu[s] != 0.0) expected_div += mu[s] * d(pi, eval[s], model);
      }
      v += w * (gain - MeanReward(model, pi) - gamma * expected_div);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace decbench
