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

#ifndef DECBENCH_TESTS_INSTANCES_HPP_
#define DECBENCH_TESTS_INSTANCES_HPP_

#include <memory>
#include <string>
#include <vector>

#include "decbench/dec_solver.hpp"
#include "decbench/rng.hpp"

// Small random DEC instances: two to four models and decisions.
namespace instances {

using namespace decbench;

inline BanditModel RandomBandit(Rng& rng, std::size_t arms) {
  BanditModel b;
  for (std::size_t a = 0; a < arms; ++a) {
    const double lo = 0.5 * rng.Uniform(), hi = lo + 0.5 * rng.Uniform();
    const double w = rng.Uniform();
    b.arms.push_back(FiniteDistribution{{lo, hi}, {w, 1.0 - w}});
  }
  return b;
}

inline TabularMdp RandomMdp(Rng& rng) {
  const int H = 2, S = 2, A = 2;
  std::vector<double> p, r;
  for (int i = 0; i < H * S * A; ++i) {
    const auto row = rng.Dirichlet(S, 1.0);
    p.insert(p.end(), row.begin(), row.end());
    r.push_back(0.5 * rng.Uniform());
  }
  return TabularMdp(H, S, A, {1.0, 0.0}, p, r);
}

inline std::vector<SufficientStatistic> Raw(const StatisticSpace& stats) {
  std::vector<SufficientStatistic> out;
  for (std::size_t i = 0; i < stats.size(); ++i) out.push_back(stats[i]);
  return out;
}

struct Instance {
  std::shared_ptr<ModelClass> cls;
  StatisticSpace stats;
  std::string key;
};

inline Instance MakeInstance(Rng& rng, const std::string& key) {
  const std::size_t models = 2 + rng() % 3, decisions = 2 + rng() % 3;
  if (key == "sq" || key == "hellinger") {
    std::vector<Model> ms;
    for (std::size_t m = 0; m < models; ++m) ms.push_back(RandomBandit(rng, decisions));
    std::vector<std::string> labels;
    for (std::size_t d = 0; d < decisions; ++d) labels.push_back("arm" + std::to_string(d));
    auto cls = std::make_shared<ModelClass>(DecisionSpace::Arms(labels), ms);
    return {cls, StatisticSpace::Models(*cls), key};
  }
  std::vector<Model> ms;
  std::vector<QFunction> qs;
  for (std::size_t m = 0; m < models; ++m) {
    const TabularMdp mdp = RandomMdp(rng);
    ms.push_back(mdp);
    qs.push_back(OptimalQ(mdp));
  }
  std::vector<double> v(8);
  for (double& x : v) x = rng.Uniform();
  qs.emplace_back(2, 2, 2, v);
  std::vector<Decision> ds;
  for (std::size_t d = 0; d < decisions; ++d) {
    std::vector<int> actions(4);
    for (int& a : actions) a = static_cast<int>(rng() % 2);
    const PolicyTable pi(2, 2, actions);
    bool seen = false;
    for (const auto& e : ds) seen = seen || *e.policy == pi;
    if (!seen) ds.push_back({"pi" + std::to_string(d), -1, pi});
  }
  auto cls = std::make_shared<ModelClass>(DecisionSpace(ds), ms);
  return {cls, StatisticSpace::QFunctions(*cls, qs), key};
}

}  // namespace instances

#endif  // DECBENCH_TESTS_INSTANCES_HPP_
