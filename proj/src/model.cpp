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

#include "decbench/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "decbench/errors.hpp"

namespace decbench {
namespace {

constexpr double kSumTolerance = 1e-12;

void CheckDistribution(const double* p, std::size_t n, const char* what) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(p[i] >= 0.0)) {
      throw DomainError(std::string(what) + ": negative or NaN probability");
    }
    total += p[i];
  }
  if (std::abs(total - 1.0) > kSumTolerance) {
    throw DomainError(std::string(what) + ": probabilities sum to " +
                      std::to_string(total));
  }
}

}  // namespace

std::size_t Rng::Categorical(const std::vector<double>& weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) throw DomainError("Categorical: no positive weight");
  const double u = Uniform() * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    acc += weights[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

std::vector<double> Rng::Dirichlet(std::size_t dim, double concentration) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> x(dim);
  double total = 0.0;
  for (auto& v : x) {
    v = gamma(*this);
    total += v;
  }
  if (!(total > 0.0)) {
    std::fill(x.begin(), x.end(), 1.0 / static_cast<double>(dim));
    return x;
  }
  for (auto& v : x) v /= total;
  return x;
}

double FiniteDistribution::Mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) m += support[i] * probs[i];
  return m;
}

bool FiniteDistribution::IsPointMass() const {
  int positive = 0;
  for (double p : probs) positive += p > 0.0 ? 1 : 0;
  return positive == 1;
}

PolicyTable::PolicyTable(int horizon, int num_states, std::vector<int> actions)
    : horizon_(horizon), num_states_(num_states), actions_(std::move(actions)) {
  if (horizon_ <= 0 || num_states_ <= 0 ||
      actions_.size() != static_cast<std::size_t>(horizon_) * num_states_) {
    throw DomainError("PolicyTable: action table must cover every (h, s)");
  }
}

PolicyTable PolicyTable::Constant(int horizon, int num_states, int action) {
  return PolicyTable(horizon, num_states,
                     std::vector<int>(static_cast<std::size_t>(horizon) *
                                          num_states,
                                      action));
}

TabularMdp::TabularMdp(int horizon, int num_states, int num_actions,
                       std::vector<double> initial,
                       std::vector<double> transitions,
                       std::vector<double> rewards)
    : horizon_(horizon),
      num_states_(num_states),
      num_actions_(num_actions),
      initial_(std::move(initial)),
      transitions_(std::move(transitions)),
      rewards_(std::move(rewards)) {
  Validate();
}

void TabularMdp::Validate() const {
  if (horizon_ <= 0 || num_states_ <= 0 || num_actions_ <= 0) {
    throw DomainError("TabularMdp: H, |S| and |A| must be positive");
  }
  const std::size_t sa =
      static_cast<std::size_t>(horizon_) * num_states_ * num_actions_;
  if (initial_.size() != static_cast<std::size_t>(num_states_) ||
      transitions_.size() != sa * num_states_ || rewards_.size() != sa) {
    throw DomainError("TabularMdp: table sizes do not match (H, S, A)");
  }
  CheckDistribution(initial_.data(), initial_.size(), "initial distribution");
  for (std::size_t row = 0; row < sa; ++row) {
    CheckDistribution(&transitions_[row * num_states_], num_states_,
                      "transition row");
  }
  for (double r : rewards_) {
    if (!std::isfinite(r)) throw DomainError("TabularMdp: non-finite reward");
  }
  const auto [hi, lo] = TotalRewardRange(*this);
  if (hi > 1.0 + kSumTolerance || lo < -kSumTolerance) {
    throw DomainError("TabularMdp: trajectory rewards must total in [0, 1]");
  }
}

bool TabularMdp::IsDeterministic() const {
  auto point_mass = [](const double* p, int n) {
    int ones = 0;
    for (int i = 0; i < n; ++i) {
      if (p[i] == 1.0) ++ones;
      else if (p[i] != 0.0) return false;
    }
    return ones == 1;
  };
  if (!point_mass(initial_.data(), num_states_)) return false;
  const std::size_t rows =
      static_cast<std::size_t>(horizon_) * num_states_ * num_actions_;
  for (std::size_t row = 0; row < rows; ++row) {
    if (!point_mass(&transitions_[row * num_states_], num_states_)) {
      return false;
    }
  }
  return true;
}

std::pair<double, double> TotalRewardRange(const TabularMdp& mdp) {
  const int H = mdp.horizon(), S = mdp.num_states(), A = mdp.num_actions();
  std::vector<double> hi(S, 0.0), lo(S, 0.0);
  for (int h = H - 1; h >= 0; --h) {
    std::vector<double> nhi(S), nlo(S);
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      double worst = std::numeric_limits<double>::infinity();
      for (int a = 0; a < A; ++a) {
        double vhi = -std::numeric_limits<double>::infinity();
        double vlo = std::numeric_limits<double>::infinity();
        if (h + 1 == H) {
          vhi = vlo = 0.0;
        } else {
          for (int n = 0; n < S; ++n) {
            if (mdp.P(h, s, a, n) <= 0.0) continue;
            vhi = std::max(vhi, hi[n]);
            vlo = std::min(vlo, lo[n]);
          }
        }
        best = std::max(best, mdp.R(h, s, a) + vhi);
        worst = std::min(worst, mdp.R(h, s, a) + vlo);
      }
      nhi[s] = best;
      nlo[s] = worst;
    }
    hi.swap(nhi);
    lo.swap(nlo);
  }
  double top = -std::numeric_limits<double>::infinity();
  double bottom = std::numeric_limits<double>::infinity();
  for (int s = 0; s < S; ++s) {
    if (mdp.initial()[s] <= 0.0) continue;
    top = std::max(top, hi[s]);
    bottom = std::min(bottom, lo[s]);
  }
  return {top, bottom};
}

bool BanditModel::IsDeterministic() const {
  return std::all_of(arms.begin(), arms.end(),
                     [](const auto& d) { return d.IsPointMass(); });
}

bool IsMdp(const Model& model) {
  return std::holds_alternative<TabularMdp>(model);
}

bool IsDeterministic(const Model& model) {
  if (const auto* b = std::get_if<BanditModel>(&model)) {
    return b->IsDeterministic();
  }
  return std::get<TabularMdp>(model).IsDeterministic();
}

bool SameModel(const Model& a, const Model& b) {
  if (a.index() != b.index()) return false;
  if (const auto* x = std::get_if<TabularMdp>(&a)) {
    return *x == std::get<TabularMdp>(b);
  }
  const auto& x = std::get<BanditModel>(a).arms;
  const auto& y = std::get<BanditModel>(b).arms;
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].support != y[i].support || x[i].probs != y[i].probs) return false;
  }
  return true;
}

QFunction::QFunction(int horizon, int num_states, int num_actions,
                     std::vector<double> values)
    : horizon_(horizon),
      num_states_(num_states),
      num_actions_(num_actions),
      values_(std::move(values)) {
  if (values_.size() !=
      static_cast<std::size_t>(horizon_) * num_states_ * num_actions_) {
    throw DomainError("QFunction: table size does not match (H, S, A)");
  }
}

QFunction QFunction::Zero(int horizon, int num_states, int num_actions) {
  return QFunction(horizon, num_states, num_actions,
                   std::vector<double>(static_cast<std::size_t>(horizon) *
                                           num_states * num_actions,
                                       0.0));
}

double QFunction::MaxValue(int h, int s) const {
  if (h >= horizon_) return 0.0;
  double best = (*this)(h, s, 0);
  for (int a = 1; a < num_actions_; ++a) best = std::max(best, (*this)(h, s, a));
  return best;
}

int QFunction::GreedyAction(int h, int s) const {
  int best = 0;
  for (int a = 1; a < num_actions_; ++a) {
    if ((*this)(h, s, a) > (*this)(h, s, best)) best = a;
  }
  return best;
}

PolicyTable QFunction::GreedyPolicy() const {
  std::vector<int> actions(static_cast<std::size_t>(horizon_) * num_states_);
  for (int h = 0; h < horizon_; ++h) {
    for (int s = 0; s < num_states_; ++s) {
      actions[h * num_states_ + s] = GreedyAction(h, s);
    }
  }
  return PolicyTable(horizon_, num_states_, std::move(actions));
}

double QFunction::OptimalValue(const std::vector<double>& initial) const {
  double v = 0.0;
  for (int s = 0; s < num_states_; ++s) v += initial[s] * MaxValue(0, s);
  return v;
}

double QFunction::ValueAt(const std::vector<double>& initial,
                          const PolicyTable& policy) const {
  double v = 0.0;
  for (int s = 0; s < num_states_; ++s) {
    v += initial[s] * (*this)(0, s, policy.Action(0, s));
  }
  return v;
}

bool QFunction::InUnitInterval() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return v >= 0.0 && v <= 1.0; });
}

DecisionSpace::DecisionSpace(std::vector<Decision> decisions)
    : decisions_(std::move(decisions)) {
  if (decisions_.empty()) throw DomainError("DecisionSpace: empty");
  std::set<std::string> labels;
  for (const auto& d : decisions_) {
    if (!labels.insert(d.label).second) {
      throw DomainError("DecisionSpace: duplicate label '" + d.label + "'");
    }
    if (d.label.find_first_of(",\"\n") != std::string::npos) {
      throw DomainError("DecisionSpace: label '" + d.label +
                        "' contains a reserved character");
    }
  }
  for (std::size_t i = 0; i < decisions_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (decisions_[i].policy && decisions_[j].policy &&
          *decisions_[i].policy == *decisions_[j].policy) {
        throw DomainError("DecisionSpace: duplicate policy table");
      }
    }
  }
}

DecisionSpace DecisionSpace::Arms(const std::vector<std::string>& labels) {
  std::vector<Decision> d;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    d.push_back({labels[i], static_cast<int>(i), std::nullopt});
  }
  return DecisionSpace(std::move(d));
}

std::size_t DecisionSpace::IndexOf(const PolicyTable& policy) const {
  for (std::size_t i = 0; i < decisions_.size(); ++i) {
    if (decisions_[i].policy && *decisions_[i].policy == policy) return i;
  }
  return kNoDecision;
}

std::size_t DecisionSpace::IndexOf(const std::string& label) const {
  for (std::size_t i = 0; i < decisions_.size(); ++i) {
    if (decisions_[i].label == label) return i;
  }
  return kNoDecision;
}

ModelClass::ModelClass(DecisionSpace decisions, std::vector<Model> models,
                       std::vector<std::string> model_labels)
    : decisions_(std::move(decisions)),
      models_(std::move(models)),
      model_labels_(std::move(model_labels)) {
  if (models_.empty()) throw DomainError("ModelClass: empty");
  if (model_labels_.empty()) {
    for (std::size_t i = 0; i < models_.size(); ++i) {
      model_labels_.push_back("M" + std::to_string(i));
    }
  }
  if (model_labels_.size() != models_.size()) {
    throw DomainError("ModelClass: one label per model required");
  }
  is_mdp_ = IsMdp(models_[0]);
  for (const auto& m : models_) {
    if (IsMdp(m) != is_mdp_) {
      throw DomainError("ModelClass: mixed bandit and MDP models");
    }
    deterministic_ = deterministic_ && IsDeterministic(m);
  }
  if (!is_mdp_) {
    for (std::size_t i = 0; i < decisions_.size(); ++i) {
      if (decisions_[i].arm != static_cast<int>(i) || decisions_[i].policy) {
        throw DomainError("ModelClass: bandit decisions must be arms 0..K-1");
      }
    }
    for (const auto& m : models_) {
      const auto& arms = std::get<BanditModel>(m).arms;
      if (arms.size() != decisions_.size()) {
        throw DomainError("ModelClass: arm count differs from decisions");
      }
      for (const auto& d : arms) {
        if (d.support.empty() || d.support.size() != d.probs.size()) {
          throw DomainError("BanditModel: malformed reward law");
        }
        for (double x : d.support) {
          if (!(x >= 0.0 && x <= 1.0)) {
            throw DomainError("BanditModel: reward outside [0, 1]");
          }
        }
        CheckDistribution(d.probs.data(), d.probs.size(), "reward law");
      }
    }
    return;
  }
  const auto& first = std::get<TabularMdp>(models_[0]);
  horizon_ = first.horizon();
  num_states_ = first.num_states();
  num_actions_ = first.num_actions();
  initial_ = first.initial();
  for (const auto& m : models_) {
    const auto& mdp = std::get<TabularMdp>(m);
    if (mdp.horizon() != horizon_ || mdp.num_states() != num_states_ ||
        mdp.num_actions() != num_actions_) {
      throw DomainError("ModelClass: MDPs disagree on (H, S, A)");
    }
    if (mdp.initial() != initial_) {
      throw DomainError("ModelClass: MDPs disagree on the initial law");
    }
  }
  for (const auto& d : decisions_.decisions()) {
    if (!d.policy || d.policy->horizon() != horizon_ ||
        d.policy->num_states() != num_states_) {
      throw DomainError("ModelClass: MDP decisions must be policy tables");
    }
    for (int a : d.policy->actions()) {
      if (a < 0 || a >= num_actions_) {
        throw DomainError("ModelClass: policy action out of range");
      }
    }
  }
}

bool Outcome::operator==(const Outcome& other) const {
  if (reward != other.reward || trajectory.size() != other.trajectory.size()) {
    return false;
  }
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& x = trajectory[i];
    const auto& y = other.trajectory[i];
    if (x.state != y.state || x.action != y.action || x.reward != y.reward ||
        x.next_state != y.next_state) {
      return false;
    }
  }
  return true;
}

Occupancy OccupancyMeasures(const TabularMdp& mdp,
                            const PolicyMixture& mixture) {
  const int H = mdp.horizon(), S = mdp.num_states(), A = mdp.num_actions();
  Occupancy occ(H, std::vector<double>(static_cast<std::size_t>(S) * A, 0.0));
  for (const auto& [policy, weight] : mixture) {
    if (policy.horizon() != H || policy.num_states() != S) {
      throw DomainError("OccupancyMeasures: policy shape mismatch");
    }
    if (weight == 0.0) continue;
    std::vector<double> state = mdp.initial();
    for (int h = 0; h < H; ++h) {
      std::vector<double> next(S, 0.0);
      for (int s = 0; s < S; ++s) {
        if (state[s] == 0.0) continue;
        const int a = policy.Action(h, s);
        occ[h][s * A + a] += weight * state[s];
        if (h + 1 < H) {
          const double* row = mdp.Row(h, s, a);
          for (int n = 0; n < S; ++n) next[n] += state[s] * row[n];
        }
      }
      state.swap(next);
    }
  }
  return occ;
}

Occupancy OccupancyMeasures(const TabularMdp& mdp, const PolicyTable& policy) {
  return OccupancyMeasures(mdp, PolicyMixture{{policy, 1.0}});
}

double MeanReward(const TabularMdp& mdp, const PolicyTable& policy) {
  const Occupancy occ = OccupancyMeasures(mdp, policy);
  const int S = mdp.num_states(), A = mdp.num_actions();
  double v = 0.0;
  for (int h = 0; h < mdp.horizon(); ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double w = occ[h][s * A + a];
        if (w != 0.0) v += w * mdp.R(h, s, a);
      }
    }
  }
  return v;
}

double MeanReward(const Model& model, const Decision& decision) {
  if (const auto* b = std::get_if<BanditModel>(&model)) {
    if (decision.arm < 0 ||
        static_cast<std::size_t>(decision.arm) >= b->arms.size()) {
      throw DomainError("MeanReward: decision is not an arm of this bandit");
    }
    return b->arms[decision.arm].Mean();
  }
  if (!decision.policy) {
    throw DomainError("MeanReward: MDP decisions must carry a policy");
  }
  return MeanReward(std::get<TabularMdp>(model), *decision.policy);
}

std::size_t OptimalDecision(const Model& model, const DecisionSpace& space) {
  std::size_t best = 0;
  double best_value = MeanReward(model, space[0]);
  for (std::size_t i = 1; i < space.size(); ++i) {
    const double v = MeanReward(model, space[i]);
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  return best;
}

double OptimalValue(const Model& model, const DecisionSpace& space) {
  return MeanReward(model, space[OptimalDecision(model, space)]);
}

Outcome Sample(const TabularMdp& mdp, const PolicyTable& policy, Rng& rng) {
  Outcome out;
  const int S = mdp.num_states();
  std::vector<double> row(S);
  int s = static_cast<int>(rng.Categorical(mdp.initial()));
  for (int h = 0; h < mdp.horizon(); ++h) {
    Transition step;
    step.state = s;
    step.action = policy.Action(h, s);
    step.reward = mdp.R(h, s, step.action);
    if (h + 1 < mdp.horizon()) {
      const double* p = mdp.Row(h, s, step.action);
      row.assign(p, p + S);
      step.next_state = static_cast<int>(rng.Categorical(row));
    }
    out.reward += step.reward;
    out.trajectory.push_back(step);
    s = step.next_state;
  }
  return out;
}

Outcome Sample(const Model& model, const Decision& decision, Rng& rng) {
  if (const auto* b = std::get_if<BanditModel>(&model)) {
    if (decision.arm < 0 ||
        static_cast<std::size_t>(decision.arm) >= b->arms.size()) {
      throw DomainError("Sample: decision is not an arm of this bandit");
    }
    const auto& law = b->arms[decision.arm];
    Outcome out;
    out.reward = law.support[rng.Categorical(law.probs)];
    return out;
  }
  if (!decision.policy) {
    throw DomainError("Sample: MDP decisions must carry a policy");
  }
  return Sample(std::get<TabularMdp>(model), *decision.policy, rng);
}

Outcome DeterministicOutcome(const Model& model, const Decision& decision) {
  if (!IsDeterministic(model)) {
    throw DomainError("DeterministicOutcome: model is not deterministic");
  }
  Rng rng(0);
  return Sample(model, decision, rng);
}

QFunction OptimalQ(const TabularMdp& mdp) {
  const int H = mdp.horizon(), S = mdp.num_states(), A = mdp.num_actions();
  QFunction q = QFunction::Zero(H, S, A);
  for (int h = H - 1; h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        double v = mdp.R(h, s, a);
        if (h + 1 < H) {
          const double* row = mdp.Row(h, s, a);
          for (int n = 0; n < S; ++n) {
            if (row[n] != 0.0) v += row[n] * q.MaxValue(h + 1, n);
          }
        }
        q.at(h, s, a) = v;
      }
    }
  }
  return q;
}

SufficientStatistic SufficientStatisticOf(const Model& model,
                                          StatisticMode mode) {
  if (mode == StatisticMode::kModel) return model;
  if (!IsMdp(model)) {
    throw UnsupportedError("q-function statistic requires a tabular MDP");
  }
  return OptimalQ(std::get<TabularMdp>(model));
}

StatisticSpace StatisticSpace::Models(const ModelClass& cls) {
  StatisticSpace space;
  space.mode_ = StatisticMode::kModel;
  for (const auto& m : cls.models()) {
    const std::size_t best = OptimalDecision(m, cls.decisions());
    space.stats_.push_back(m);
    space.optimal_values_.push_back(MeanReward(m, cls.decisions()[best]));
    space.greedy_.push_back(best);
    space.greedy_objects_.push_back(cls.decisions()[best]);
  }
  return space;
}

StatisticSpace StatisticSpace::QFunctions(const ModelClass& cls,
                                          std::vector<QFunction> qs) {
  if (!cls.is_mdp()) {
    throw UnsupportedError("q-function statistics require an MDP class");
  }
  if (qs.empty()) throw DomainError("StatisticSpace: empty Q class");
  StatisticSpace space;
  space.mode_ = StatisticMode::kQFunction;
  for (const auto& q : qs) {
    if (q.horizon() != cls.horizon() || q.num_states() != cls.num_states() ||
        q.num_actions() != cls.num_actions()) {
      throw DomainError("StatisticSpace: Q shape differs from the class");
    }
    PolicyTable greedy = q.GreedyPolicy();
    const std::size_t idx = cls.decisions().IndexOf(greedy);
    space.stats_.push_back(q);
    space.optimal_values_.push_back(q.OptimalValue(cls.initial()));
    space.greedy_.push_back(idx);
    space.greedy_objects_.push_back(
        idx != kNoDecision ? cls.decisions()[idx]
                           : Decision{"greedy", -1, std::move(greedy)});
  }
  space.qs_ = std::move(qs);
  return space;
}

}  // namespace decbench
