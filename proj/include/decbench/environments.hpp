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

#ifndef DECBENCH_ENVIRONMENTS_HPP_
#define DECBENCH_ENVIRONMENTS_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "decbench/model.hpp"
#include "decbench/rng.hpp"

namespace decbench {

// A realizable class with its designated true model and, for RL families,
// a realizable Q class.
struct Environment {
  std::string key;
  std::shared_ptr<const ModelClass> cls;
  std::size_t true_model = 0;
  std::optional<std::vector<QFunction>> q_class;
  nlohmann::json metadata = nlohmann::json::object();

  const Model& truth() const { return cls->model(true_model); }
  StatisticSpace Statistics(StatisticMode mode) const;
};

// Greedy policies of `qs` followed by the requested constant-action
// policies, duplicates dropped.
DecisionSpace PolicyDecisionSpace(const std::vector<QFunction>& qs,
                                  const std::vector<int>& constant_actions,
                                  int horizon, int num_states);

Environment MakeBanditClass(std::vector<BanditModel> models,
                            std::vector<std::string> arm_labels,
                            std::size_t true_model = 0);

// Lock states: 0 = s (on path), 1 = t (absorbing). Actions: 0 = a, 1 = b.
// Model index bit h is the correct action at layer h.
Environment MakeLockFamily(int horizon, double delta, std::size_t true_model = 0);
// Probability that `policy` plays the full lock sequence of `model` from s.
double LockHitProbability(const ModelClass& lock, std::size_t model,
                          const PolicyMixture& policy);

// State 0 = root s, 1..2^(H-1)-1 = tree nodes in heap order, then N
// revealing states. Decisions: N leaf policies, then constant-a.
Environment MakePsHardFamily(int horizon, std::size_t true_model = 0);

// Q class = product over layers of the closure of {Q*_h, 0} under the true
// model's backups.
Environment MakeCompleteClass(std::vector<TabularMdp> models,
                              std::size_t true_model,
                              std::size_t size_cap = 4096);

// Built-in fixtures: "chain2" (deterministic) and "chain2-noisy".
std::vector<TabularMdp> BuiltinChainFixture(const std::string& name);
// Built-in bandit fixture "bernoulli3".
std::vector<BanditModel> BuiltinBanditFixture(const std::string& name);

// "lock(H,Delta)" | "ps-hard(H)" | "bandit(file-or-builtin)" |
// "complete(file-or-builtin)".
Environment MakeEnvironment(const std::string& key, std::size_t true_model = 0);

}  // namespace decbench

#endif  // DECBENCH_ENVIRONMENTS_HPP_
