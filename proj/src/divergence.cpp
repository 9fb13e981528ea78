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

#include "decbench/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "decbench/errors.hpp"

namespace decbench {
namespace {

const TabularMdp& RequireMdp(const Model& m, const char* who) {
  const auto* mdp = std::get_if<TabularMdp>(&m);
  if (mdp == nullptr) {
    throw UnsupportedError(std::string(who) + " requires a tabular MDP");
  }
  return *mdp;
}

const PolicyTable& RequirePolicy(const Decision& pi, const char* who) {
  if (!pi.policy) {
    throw DomainError(std::string(who) + " requires a policy decision");
  }
  return *pi.policy;
}

QFunction AsQFunction(const SufficientStatistic& psi, const char* who) {
  if (const auto* q = std::get_if<QFunction>(&psi)) return *q;
  return OptimalQ(RequireMdp(std::get<Model>(psi), who));
}

void CheckShapes(const QFunction& q, const TabularMdp& m) {
  if (q.horizon() != m.horizon() || q.num_states() != m.num_states() ||
      q.num_actions() != m.num_actions()) {
    throw DomainError("Q-function and MDP disagree on (H, S, A)");
  }
}

}  // namespace

double BellmanResidual(int h, const QFunction& q, const Transition& z) {
  const double next = z.next_state < 0 ? 0.0 : q.MaxValue(h + 1, z.next_state);
  return q(h, z.state, z.action) - (z.reward + next);
}

std::vector<double> BellmanApply(const TabularMdp& mdp, int h,
                                 const std::vector<double>& next_layer) {
  const int S = mdp.num_states(), A = mdp.num_actions();
  if (h < 0 || h >= mdp.horizon()) throw DomainError("BellmanApply: bad layer");
  if (!next_layer.empty() &&
      next_layer.size() != static_cast<std::size_t>(S) * A) {
    throw DomainError("BellmanApply: next layer has the wrong size");
  }
  std::vector<double> vmax(S, 0.0);
  if (!next_layer.empty() && h + 1 < mdp.horizon()) {
    for (int s = 0; s < S; ++s) {
      vmax[s] = *std::max_element(next_layer.begin() + s * A,
                                  next_layer.begin() + (s + 1) * A);
    }
  }
  std::vector<double> out(static_cast<std::size_t>(S) * A);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      double v = mdp.R(h, s, a);
      if (h + 1 < mdp.horizon()) {
        const double* row = mdp.Row(h, s, a);
        for (int n = 0; n < S; ++n) {
          if (row[n] != 0.0) v += row[n] * vmax[n];
        }
      }
      out[s * A + a] = v;
    }
  }
  return out;
}

QFunction BellmanBackup(const TabularMdp& mdp, const QFunction& q) {
  CheckShapes(q, mdp);
  const int H = mdp.horizon(), S = mdp.num_states(), A = mdp.num_actions();
  const std::size_t layer = static_cast<std::size_t>(S) * A;
  std::vector<double> values(H * layer);
  for (int h = 0; h < H; ++h) {
    std::vector<double> next;
    if (h + 1 < H) {
      next.assign(q.values().begin() + (h + 1) * layer,
                  q.values().begin() + (h + 2) * layer);
    }
    const std::vector<double> t = BellmanApply(mdp, h, next);
    std::copy(t.begin(), t.end(), values.begin() + h * layer);
  }
  return QFunction(H, S, A, std::move(values));
}

double HellingerSq(const FiniteDistribution& p, const FiniteDistribution& q) {
  std::map<double, std::pair<double, double>> mass;
  for (std::size_t i = 0; i < p.support.size(); ++i) {
    if (p.probs[i] < 0.0) throw DomainError("HellingerSq: negative mass");
    mass[p.support[i]].first += p.probs[i];
  }
  for (std::size_t i = 0; i < q.support.size(); ++i) {
    if (q.probs[i] < 0.0) throw DomainError("HellingerSq: negative mass");
    mass[q.support[i]].second += q.probs[i];
  }
  double total = 0.0;
  for (const auto& [x, pq] : mass) {
    const double d = std::sqrt(pq.first) - std::sqrt(pq.second);
    total += d * d;
  }
  return total;
}

std::vector<std::pair<std::vector<double>, double>> TrajectoryLaw(
    const TabularMdp& mdp, const PolicyTable& policy, double enumeration_cap) {
  const int H = mdp.horizon(), S = mdp.num_states();
  const double size = std::pow(static_cast<double>(S), H) *
                      std::pow(static_cast<double>(mdp.num_actions()), H);
  if (size > enumeration_cap) {
    throw DomainError("trajectory enumeration exceeds the cap (|S|^H |A|^H = " +
                      std::to_string(size) + ")");
  }
  std::vector<std::pair<std::vector<double>, double>> law;
  std::vector<double> key;
  auto walk = [&](auto&& self, int h, int s, double prob) -> void {
    const int a = policy.Action(h, s);
    key.push_back(s);
    key.push_back(a);
    key.push_back(mdp.R(h, s, a));
    if (h + 1 == H) {
      law.emplace_back(key, prob);
    } else {
      for (int n = 0; n < S; ++n) {
        const double p = mdp.P(h, s, a, n);
        if (p > 0.0) self(self, h + 1, n, prob * p);
      }
    }
    key.resize(key.size() - 3);
  };
  for (int s = 0; s < S; ++s) {
    if (mdp.initial()[s] > 0.0) walk(walk, 0, s, mdp.initial()[s]);
  }
  return law;
}

double SqDivergence(const Decision& pi, const SufficientStatistic& psi,
                    const Model& m) {
  const double fm = MeanReward(m, pi);
  double fpsi;
  if (const auto* model = std::get_if<Model>(&psi)) {
    fpsi = MeanReward(*model, pi);
  } else {
    const auto& mdp = RequireMdp(m, "sq divergence with a Q statistic");
    fpsi = std::get<QFunction>(psi).ValueAt(mdp.initial(),
                                            RequirePolicy(pi, "sq divergence"));
  }
  return (fpsi - fm) * (fpsi - fm);
}

double HellingerDivergence(const Decision& pi, const SufficientStatistic& psi,
                           const Model& m, double enumeration_cap) {
  const auto* other = std::get_if<Model>(&psi);
  if (other == nullptr) {
    throw UnsupportedError("hellinger divergence needs a model statistic");
  }
  if (IsMdp(*other) != IsMdp(m)) {
    throw DomainError("hellinger divergence: model kinds differ");
  }
  if (!IsMdp(m)) {
    const auto& a = std::get<BanditModel>(*other).arms;
    const auto& b = std::get<BanditModel>(m).arms;
    if (pi.arm < 0 || static_cast<std::size_t>(pi.arm) >= a.size() ||
        a.size() != b.size()) {
      throw DomainError("hellinger divergence: decision is not an arm");
    }
    return HellingerSq(a[pi.arm], b[pi.arm]);
  }
  const auto& policy = RequirePolicy(pi, "hellinger divergence");
  const auto& x = std::get<TabularMdp>(*other);
  const auto& y = std::get<TabularMdp>(m);
  if (x.IsDeterministic() && y.IsDeterministic()) {
    Rng rng(0);
    return Sample(x, policy, rng) == Sample(y, policy, rng) ? 0.0 : 2.0;
  }
  std::map<std::vector<double>, std::pair<double, double>> mass;
  for (const auto& [k, p] : TrajectoryLaw(x, policy, enumeration_cap)) {
    mass[k].first += p;
  }
  for (const auto& [k, p] : TrajectoryLaw(y, policy, enumeration_cap)) {
    mass[k].second += p;
  }
  double total = 0.0;
  for (const auto& [k, pq] : mass) {
    const double d = std::sqrt(pq.first) - std::sqrt(pq.second);
    total += d * d;
  }
  return total;
}

std::vector<double> ExpectedDiscrepancy(const TabularMdp& m,
                                        const PolicyTable& pi,
                                        const QFunction& q,
                                        const Discrepancy& discrepancy) {
  CheckShapes(q, m);
  const int H = m.horizon(), S = m.num_states(), A = m.num_actions();
  const Occupancy occ = OccupancyMeasures(m, pi);
  std::vector<double> e(H, 0.0);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double w = occ[h][s * A + a];
        if (w == 0.0) continue;
        const double r = m.R(h, s, a);
        double inner = 0.0;
        if (!discrepancy) {
          double next = 0.0;
          if (h + 1 < H) {
            const double* row = m.Row(h, s, a);
            for (int n = 0; n < S; ++n) {
              if (row[n] != 0.0) next += row[n] * q.MaxValue(h + 1, n);
            }
          }
          inner = q(h, s, a) - (r + next);
        } else if (h + 1 == H) {
          inner = discrepancy(h, q, Transition{s, a, r, -1});
        } else {
          const double* row = m.Row(h, s, a);
          for (int n = 0; n < S; ++n) {
            if (row[n] != 0.0) {
              inner += row[n] * discrepancy(h, q, Transition{s, a, r, n});
            }
          }
        }
        e[h] += w * inner;
      }
    }
  }
  return e;
}

double BilinearDivergence(const Decision& pi, const QFunction& q,
                          const TabularMdp& m,
                          const Discrepancy& discrepancy) {
  const auto e = ExpectedDiscrepancy(
      m, RequirePolicy(pi, "bilinear divergence"), q, discrepancy);
  double total = 0.0;
  for (double x : e) total += x * x;
  return total;
}

double SbeDivergence(const Decision& pi, const QFunction& q,
                     const TabularMdp& m) {
  CheckShapes(q, m);
  const int H = m.horizon(), S = m.num_states(), A = m.num_actions();
  const Occupancy occ =
      OccupancyMeasures(m, RequirePolicy(pi, "sbe divergence"));
  const QFunction tq = BellmanBackup(m, q);
  double total = 0.0;
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double w = occ[h][s * A + a];
        if (w == 0.0) continue;
        const double d = q(h, s, a) - tq(h, s, a);
        total += w * d * d;
      }
    }
  }
  return total;
}

Divergence Divergence::Squared() { return Divergence(DivergenceKind::kSquared); }

Divergence Divergence::Hellinger(double enumeration_cap) {
  Divergence d(DivergenceKind::kHellinger);
  d.enumeration_cap_ = enumeration_cap;
  return d;
}

Divergence Divergence::Bilinear(Discrepancy discrepancy) {
  Divergence d(DivergenceKind::kBilinear);
  d.discrepancy_ = std::move(discrepancy);
  return d;
}

Divergence Divergence::Sbe() { return Divergence(DivergenceKind::kSbe); }

Divergence Divergence::FromKey(std::string_view key) {
  if (key == "sq") return Squared();
  if (key == "hellinger") return Hellinger();
  if (key == "bilinear") return Bilinear();
  if (key == "sbe") return Sbe();
  throw DomainError("unknown divergence key '" + std::string(key) + "'");
}

std::string Divergence::key() const {
  std::string base;
  switch (kind_) {
    case DivergenceKind::kSquared: base = "sq"; break;
    case DivergenceKind::kHellinger: base = "hellinger"; break;
    case DivergenceKind::kBilinear: base = "bilinear"; break;
    case DivergenceKind::kSbe: base = "sbe"; break;
  }
  return flipped_ ? "flip(" + base + ")" : base;
}

bool Divergence::symmetric() const {
  return kind_ == DivergenceKind::kSquared ||
         kind_ == DivergenceKind::kHellinger;
}

std::optional<double> Divergence::lipschitz() const {
  if (symmetric()) return 1.0;
  return std::nullopt;
}

std::optional<double> Divergence::triangle_constant() const {
  if (symmetric()) return 2.0;
  return std::nullopt;
}

double Divergence::UpperBound(int horizon) const {
  switch (kind_) {
    case DivergenceKind::kSquared: return 1.0;
    case DivergenceKind::kHellinger: return 2.0;
    default: return 4.0 * std::max(horizon, 1);
  }
}

bool Divergence::accepts_q_functions() const {
  return kind_ != DivergenceKind::kHellinger && !flipped_;
}

Divergence Divergence::Flipped() const {
  if (kind_ == DivergenceKind::kBilinear || kind_ == DivergenceKind::kSbe) {
    throw UnsupportedError("flip of a Q-statistic divergence is not defined");
  }
  Divergence d = *this;
  d.flipped_ = !flipped_;
  return d;
}

double Divergence::operator()(const Decision& pi,
                              const SufficientStatistic& psi,
                              const Model& m) const {
  if (!flipped_) return Evaluate(pi, psi, m);
  const auto* model = std::get_if<Model>(&psi);
  if (model == nullptr) {
    throw UnsupportedError("flipped divergence needs a model in both slots");
  }
  return Evaluate(pi, SufficientStatistic(m), *model);
}

double Divergence::Evaluate(const Decision& pi, const SufficientStatistic& psi,
                            const Model& m) const {
  switch (kind_) {
    case DivergenceKind::kSquared:
      return SqDivergence(pi, psi, m);
    case DivergenceKind::kHellinger:
      return HellingerDivergence(pi, psi, m, enumeration_cap_);
    case DivergenceKind::kBilinear:
      return BilinearDivergence(pi, AsQFunction(psi, "bilinear divergence"),
                                RequireMdp(m, "bilinear divergence"),
                                discrepancy_);
    case DivergenceKind::kSbe:
      return SbeDivergence(pi, AsQFunction(psi, "sbe divergence"),
                           RequireMdp(m, "sbe divergence"));
  }
  return 0.0;
}

double MeasureLipschitzSq(const Divergence& d, const ModelClass& cls) {
  double worst = 0.0;
  for (const auto& pi : cls.decisions().decisions()) {
    for (std::size_t i = 0; i < cls.size(); ++i) {
      const double fi = MeanReward(cls.model(i), pi);
      for (std::size_t j = 0; j < cls.size(); ++j) {
        if (i == j) continue;
        const double diff = fi - MeanReward(cls.model(j), pi);
        const double div = d(pi, SufficientStatistic(cls.model(i)), cls.model(j));
        if (diff == 0.0) continue;
        if (div <= 0.0) return std::numeric_limits<double>::infinity();
        worst = std::max(worst, diff * diff / div);
      }
    }
  }
  return worst;
}

}  // namespace decbench
