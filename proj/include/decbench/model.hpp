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

#ifndef DECBENCH_MODEL_HPP_
#define DECBENCH_MODEL_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "decbench/rng.hpp"

namespace decbench {

inline constexpr std::size_t kNoDecision = static_cast<std::size_t>(-1);

// Finitely supported distribution over reals.
struct FiniteDistribution {
  std::vector<double> support;
  std::vector<double> probs;

  static FiniteDistribution PointMass(double x) { return {{x}, {1.0}}; }
  double Mean() const;
  bool IsPointMass() const;
};

// Deterministic non-stationary policy, actions[h * num_states + s].
class PolicyTable {
 public:
  PolicyTable() = default;
  PolicyTable(int horizon, int num_states, std::vector<int> actions);
  static PolicyTable Constant(int horizon, int num_states, int action);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int Action(int h, int s) const { return actions_[h * num_states_ + s]; }
  const std::vector<int>& actions() const { return actions_; }

  bool operator==(const PolicyTable& other) const = default;

 private:
  int horizon_ = 0;
  int num_states_ = 0;
  std::vector<int> actions_;
};

using PolicyMixture = std::vector<std::pair<PolicyTable, double>>;

// Layers are 0-based: h = 0 is the first layer.
class TabularMdp {
 public:
  TabularMdp() = default;
  // transitions indexed [h][s][a][s'], rewards [h][s][a], both flattened.
  TabularMdp(int horizon, int num_states, int num_actions,
             std::vector<double> initial, std::vector<double> transitions,
             std::vector<double> rewards);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  const std::vector<double>& initial() const { return initial_; }
  const std::vector<double>& transitions() const { return transitions_; }
  const std::vector<double>& rewards() const { return rewards_; }

  double P(int h, int s, int a, int next) const {
    return transitions_[((static_cast<std::size_t>(h) * num_states_ + s) *
                             num_actions_ + a) * num_states_ + next];
  }
  const double* Row(int h, int s, int a) const {
    return &transitions_[((static_cast<std::size_t>(h) * num_states_ + s) *
                              num_actions_ + a) * num_states_];
  }
  double R(int h, int s, int a) const {
    return rewards_[(static_cast<std::size_t>(h) * num_states_ + s) *
                        num_actions_ + a];
  }

  bool IsDeterministic() const;

  bool operator==(const TabularMdp& other) const = default;

 private:
  void Validate() const;

  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> initial_;
  std::vector<double> transitions_;
  std::vector<double> rewards_;
};

// Observation equals reward; arms[i] is the reward law of decision i.
struct BanditModel {
  std::vector<FiniteDistribution> arms;
  bool IsDeterministic() const;
};

using Model = std::variant<BanditModel, TabularMdp>;

bool IsMdp(const Model& model);
bool IsDeterministic(const Model& model);
bool SameModel(const Model& a, const Model& b);

// Q_h(s, a) stored as values[(h * S + s) * A + a].
class QFunction {
 public:
  QFunction() = default;
  QFunction(int horizon, int num_states, int num_actions,
            std::vector<double> values);
  static QFunction Zero(int horizon, int num_states, int num_actions);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  const std::vector<double>& values() const { return values_; }

  double operator()(int h, int s, int a) const {
    return values_[(static_cast<std::size_t>(h) * num_states_ + s) *
                       num_actions_ + a];
  }
  double& at(int h, int s, int a) {
    return values_[(static_cast<std::size_t>(h) * num_states_ + s) *
                       num_actions_ + a];
  }
  // max_a Q_h(s, a); zero past the horizon.
  double MaxValue(int h, int s) const;
  int GreedyAction(int h, int s) const;
  PolicyTable GreedyPolicy() const;
  // f^Q(pi_Q) = E_{s ~ d1} max_a Q_1(s, a).
  double OptimalValue(const std::vector<double>& initial) const;
  // E_{s ~ d1} Q_1(s, pi_1(s)).
  double ValueAt(const std::vector<double>& initial,
                 const PolicyTable& policy) const;
  bool InUnitInterval() const;

  bool operator==(const QFunction& other) const = default;

 private:
  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> values_;
};

// A bandit arm (by index) or a deterministic policy table.
struct Decision {
  std::string label;
  int arm = -1;
  std::optional<PolicyTable> policy;
};

class DecisionSpace {
 public:
  DecisionSpace() = default;
  explicit DecisionSpace(std::vector<Decision> decisions);
  static DecisionSpace Arms(const std::vector<std::string>& labels);

  std::size_t size() const { return decisions_.size(); }
  const Decision& operator[](std::size_t i) const { return decisions_[i]; }
  const std::vector<Decision>& decisions() const { return decisions_; }
  std::size_t IndexOf(const PolicyTable& policy) const;
  std::size_t IndexOf(const std::string& label) const;

 private:
  std::vector<Decision> decisions_;
};

class ModelClass {
 public:
  ModelClass(DecisionSpace decisions, std::vector<Model> models,
             std::vector<std::string> model_labels = {});

  std::size_t size() const { return models_.size(); }
  const Model& model(std::size_t i) const { return models_[i]; }
  const std::vector<Model>& models() const { return models_; }
  const std::string& model_label(std::size_t i) const {
    return model_labels_[i];
  }
  const DecisionSpace& decisions() const { return decisions_; }
  bool is_mdp() const { return is_mdp_; }
  bool deterministic() const { return deterministic_; }
  // Shared MDP shape; zero for bandit classes.
  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  const std::vector<double>& initial() const { return initial_; }

 private:
  DecisionSpace decisions_;
  std::vector<Model> models_;
  std::vector<std::string> model_labels_;
  bool is_mdp_ = false;
  bool deterministic_ = true;
  int horizon_ = 0;
  int num_states_ = 0;
  int num_actions_ = 0;
  std::vector<double> initial_;
};

// Tagged union: a model, or a Q-function with the class's d1.
using SufficientStatistic = std::variant<Model, QFunction>;
enum class StatisticMode { kModel, kQFunction };

struct Transition {
  int state = 0;
  int action = 0;
  double reward = 0.0;
  int next_state = -1;  // -1 after the last layer
};

struct Outcome {
  double reward = 0.0;
  std::vector<Transition> trajectory;  // empty for bandits

  bool operator==(const Outcome& other) const;
};

// occupancy[h][s * A + a]
using Occupancy = std::vector<std::vector<double>>;

Occupancy OccupancyMeasures(const TabularMdp& mdp, const PolicyTable& policy);
Occupancy OccupancyMeasures(const TabularMdp& mdp,
                            const PolicyMixture& mixture);

double MeanReward(const TabularMdp& mdp, const PolicyTable& policy);
double MeanReward(const Model& model, const Decision& decision);

// argmax over the decision space, lowest index on ties.
std::size_t OptimalDecision(const Model& model, const DecisionSpace& space);
double OptimalValue(const Model& model, const DecisionSpace& space);

Outcome Sample(const Model& model, const Decision& decision, Rng& rng);
Outcome Sample(const TabularMdp& mdp, const PolicyTable& policy, Rng& rng);
// The unique outcome of a deterministic model.
Outcome DeterministicOutcome(const Model& model, const Decision& decision);

QFunction OptimalQ(const TabularMdp& mdp);
SufficientStatistic SufficientStatisticOf(const Model& model,
                                          StatisticMode mode);

// The statistic pool a randomized estimate is supported on.
class StatisticSpace {
 public:
  static StatisticSpace Models(const ModelClass& cls);
  static StatisticSpace QFunctions(const ModelClass& cls,
                                   std::vector<QFunction> qs);

  StatisticMode mode() const { return mode_; }
  std::size_t size() const { return stats_.size(); }
  const SufficientStatistic& operator[](std::size_t i) const {
    return stats_[i];
  }
  // f^psi(pi_psi).
  double OptimalValue(std::size_t i) const { return optimal_values_[i]; }
  // pi_psi as an index into the class decision space, or kNoDecision.
  std::size_t GreedyDecision(std::size_t i) const { return greedy_[i]; }
  // pi_psi as a decision, present even when off the decision space.
  const Decision& GreedyDecisionObject(std::size_t i) const {
    return greedy_objects_[i];
  }
  const std::vector<QFunction>& q_functions() const { return qs_; }

 private:
  StatisticMode mode_ = StatisticMode::kModel;
  std::vector<SufficientStatistic> stats_;
  std::vector<QFunction> qs_;
  std::vector<double> optimal_values_;
  std::vector<std::size_t> greedy_;
  std::vector<Decision> greedy_objects_;
};

// Max and min total reward over all trajectories, by DP.
std::pair<double, double> TotalRewardRange(const TabularMdp& mdp);

}  // namespace decbench

#endif  // DECBENCH_MODEL_HPP_
