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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"

#include "decbench/divergence.hpp"
#include "decbench/environments.hpp"
#include "decbench/errors.hpp"
#include "decbench/model.hpp"

using namespace decbench;

namespace {

BanditModel Deterministic(std::vector<double> means) {
  BanditModel b;
  for (double m : means) b.arms.push_back(FiniteDistribution::PointMass(m));
  return b;
}

// H=2, one state per layer reachable; reward 1 at layer 1 for action 1.
TabularMdp TwoStepChain() {
  const int H = 2, S = 2, A = 2;
  std::vector<double> p(H * S * A * S, 0.0);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) p[((h * S + s) * A + a) * S + a] = 1.0;
    }
  }
  std::vector<double> r(H * S * A, 0.0);
  r[(1 * S + 1) * A + 1] = 1.0;
  return TabularMdp(H, S, A, {1.0, 0.0}, p, r);
}

std::vector<Environment> Families() {
  std::vector<Environment> envs;
  envs.push_back(MakeLockFamily(3, 1.0, 5));
  envs.push_back(MakePsHardFamily(4, 1));
  envs.push_back(MakeCompleteClass(BuiltinChainFixture("chain2"), 0));
  envs.push_back(MakeCompleteClass(BuiltinChainFixture("chain2-noisy"), 1));
  envs.push_back(MakeBanditClass(BuiltinBanditFixture("bernoulli3"), {"x", "y", "z"}, 2));
  return envs;
}

}  // namespace

TEST_CASE("mean reward reads bandit tables") {
  const BanditModel b = Deterministic({0.3, 0.7});
  const DecisionSpace arms = DecisionSpace::Arms({"pi1", "pi2"});
  CHECK(MeanReward(Model{b}, arms[1]) == doctest::Approx(0.7));
  BanditModel coin{{FiniteDistribution{{0.0, 1.0}, {0.5, 0.5}}}};
  CHECK(MeanReward(Model{coin}, DecisionSpace::Arms({"a"})[0]) == doctest::Approx(0.5));
}

TEST_CASE("optimal decision breaks ties by lowest index") {
  const DecisionSpace arms = DecisionSpace::Arms({"pi1", "pi2"});
  CHECK(OptimalDecision(Model{Deterministic({0.3, 0.7})}, arms) == 1);
  CHECK(OptimalDecision(Model{Deterministic({0.5, 0.5})}, arms) == 0);
}

TEST_CASE("two-step chain earns 1 under the reaching policy") {
  const TabularMdp m = TwoStepChain();
  const PolicyTable reach = PolicyTable::Constant(2, 2, 1);
  CHECK(MeanReward(m, reach) == doctest::Approx(1.0));
  CHECK(oracle::PathValue(m, reach) == doctest::Approx(1.0));
  Rng rng(3);
  for (int i = 0; i < 100; ++i) CHECK(Sample(m, reach, rng).reward == 1.0);
  CHECK(MeanReward(m, PolicyTable::Constant(2, 2, 0)) == 0.0);
}

TEST_CASE("occupancy value agrees with enumeration and rollouts on every family") {
  for (const auto& env : Families()) {
    const ModelClass& cls = *env.cls;
    Rng root(17);
    for (std::size_t m = 0; m < cls.size(); ++m) {
      for (std::size_t d = 0; d < cls.decisions().size(); ++d) {
        const double exact = MeanReward(cls.model(m), cls.decisions()[d]);
        CHECK(exact == doctest::Approx(oracle::Value(cls.model(m), cls.decisions()[d])).epsilon(1e-12));
        if (m > 1 || d > 3) continue;
        Rng rng = root.Split(m * 100 + d);
        const int N = 10000;
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < N; ++i) {
          const double r = Sample(cls.model(m), cls.decisions()[d], rng).reward;
          sum += r;
          sq += r * r;
        }
        const double mean = sum / N;
        const double sd = std::sqrt(std::max(sq / N - mean * mean, 0.0) / N);
        CHECK(std::abs(mean - exact) <= 4.0 * sd + 1e-12);
      }
    }
  }
}

TEST_CASE("optimal decision dominates every decision") {
  for (const auto& env : Families()) {
    const ModelClass& cls = *env.cls;
    for (std::size_t m = 0; m < cls.size(); ++m) {
      const double best = MeanReward(cls.model(m), cls.decisions()[OptimalDecision(cls.model(m), cls.decisions())]);
      for (const auto& d : cls.decisions().decisions()) {
        CHECK(best >= MeanReward(cls.model(m), d) - 1e-15);
      }
    }
  }
}

TEST_CASE("deterministic sampling") {
  const BanditModel b = Deterministic({0.7});
  Rng rng(1);
  const Decision arm = DecisionSpace::Arms({"a"})[0];
  for (int i = 0; i < 20; ++i) CHECK(Sample(Model{b}, arm, rng).reward == 0.7);

  const auto lock = MakeLockFamily(4, 1.0, 9);
  const auto& d = lock.cls->decisions()[3];
  const Outcome o = DeterministicOutcome(lock.truth(), d);
  for (int i = 0; i < 20; ++i) CHECK(Sample(lock.truth(), d, rng) == o);
  CHECK(o.trajectory.size() == 4);
}

TEST_CASE("Bernoulli arm empirical mean") {
  BanditModel coin{{FiniteDistribution{{0.0, 1.0}, {0.5, 0.5}}}};
  Rng rng(2024);
  const Decision arm = DecisionSpace::Arms({"a"})[0];
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) sum += Sample(Model{coin}, arm, rng).reward;
  CHECK(std::abs(sum / 10000 - 0.5) <= 0.02);
}

TEST_CASE("same seed gives the same stream and splits differ") {
  Rng a(99), b(99);
  for (int i = 0; i < 50; ++i) CHECK(a() == b());
  Rng c = Rng(99).Split(1), d = Rng(99).Split(2);
  CHECK(c() != d());
}

TEST_CASE("optimal Q satisfies the Bellman equation") {
  for (const auto& env : Families()) {
    const ModelClass& cls = *env.cls;
    if (!cls.is_mdp()) continue;
    for (std::size_t m = 0; m < cls.size(); ++m) {
      const auto& mdp = std::get<TabularMdp>(cls.model(m));
      const QFunction q = OptimalQ(mdp);
      const int H = mdp.horizon(), S = mdp.num_states(), A = mdp.num_actions();
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) CHECK(q(H - 1, s, a) == mdp.R(H - 1, s, a));
      }
      const QFunction backed = BellmanBackup(mdp, q);
      for (std::size_t i = 0; i < q.values().size(); ++i) {
        CHECK(std::abs(backed.values()[i] - q.values()[i]) <= 1e-12);
      }
      // pi_{Q*} is optimal among all policies, so it dominates the class's
      // decisions and matches the value of its own greedy policy.
      CHECK(q.OptimalValue(mdp.initial()) ==
            doctest::Approx(oracle::PathValue(mdp, q.GreedyPolicy())).epsilon(1e-12));
      CHECK(q.OptimalValue(mdp.initial()) >= OptimalValue(cls.model(m), cls.decisions()) - 1e-12);
    }
  }
}

TEST_CASE("lock optimal Q puts Delta on the lock path only") {
  const double delta = 0.6;
  const auto env = MakeLockFamily(4, delta, 0b1011);
  const auto& mdp = std::get<TabularMdp>(env.truth());
  const QFunction q = OptimalQ(mdp);
  for (int h = 0; h < 4; ++h) {
    const int correct = (0b1011 >> h) & 1;
    CHECK(q(h, 0, correct) == doctest::Approx(delta));
    CHECK(q(h, 0, 1 - correct) == 0.0);
    CHECK(q(h, 1, 0) == 0.0);
    CHECK(q(h, 1, 1) == 0.0);
  }
}

TEST_CASE("ps-hard optimum is the leaf policy of the model") {
  const auto env = MakePsHardFamily(5, 0);
  const ModelClass& cls = *env.cls;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const std::size_t best = OptimalDecision(cls.model(i), cls.decisions());
    CHECK(cls.decisions()[best].label == "leaf" + std::to_string(i));
    CHECK(MeanReward(cls.model(i), cls.decisions()[best]) == doctest::Approx(1.0));
  }
}

TEST_CASE("occupancy measures") {
  SUBCASE("single layer is d1 times the action choice") {
    const TabularMdp m(1, 2, 2, {0.25, 0.75}, {1, 0, 0, 1, 0, 1, 1, 0}, {0, 0, 0, 0});
    const Occupancy occ = OccupancyMeasures(m, PolicyTable(1, 2, {1, 0}));
    CHECK(occ[0][0 * 2 + 1] == doctest::Approx(0.25));
    CHECK(occ[0][1 * 2 + 0] == doctest::Approx(0.75));
    CHECK(occ[0][0] == 0.0);
  }
  SUBCASE("layers sum to one and mixtures are linear") {
    const auto env = MakeCompleteClass(BuiltinChainFixture("chain2-noisy"), 0);
    const auto& mdp = std::get<TabularMdp>(env.truth());
    const PolicyTable a = PolicyTable::Constant(3, 2, 0), b = PolicyTable::Constant(3, 2, 1);
    const Occupancy oa = OccupancyMeasures(mdp, a), ob = OccupancyMeasures(mdp, b);
    const Occupancy mix = OccupancyMeasures(mdp, PolicyMixture{{a, 0.3}, {b, 0.7}});
    for (int h = 0; h < 3; ++h) {
      double total = 0.0;
      for (std::size_t i = 0; i < mix[h].size(); ++i) {
        total += mix[h][i];
        CHECK(mix[h][i] == doctest::Approx(0.3 * oa[h][i] + 0.7 * ob[h][i]).epsilon(1e-14));
      }
      CHECK(std::abs(total - 1.0) <= 1e-10);
    }
  }
  SUBCASE("uniform play reaches the last lock layer with probability 2^-(H-1)") {
    for (int H = 2; H <= 6; ++H) {
      const auto env = MakeLockFamily(H, 1.0, 0);
      const auto& mdp = std::get<TabularMdp>(env.truth());
      // Uniform random play on the path is the uniform mixture over every
      // action sequence at the lock state.
      std::vector<PolicyTable> all;
      PolicyMixture mixture;
      for (int bits = 0; bits < (1 << H); ++bits) {
        std::vector<int> actions(H * 2, 0);
        for (int h = 0; h < H; ++h) actions[h * 2] = (bits >> h) & 1;
        all.emplace_back(H, 2, actions);
        mixture.push_back({all.back(), 1.0 / (1 << H)});
      }
      const Occupancy occ = OccupancyMeasures(mdp, mixture);
      const double reach = occ[H - 1][0] + occ[H - 1][1];
      CHECK(reach == doctest::Approx(std::pow(0.5, H - 1)));
      CHECK(reach == doctest::Approx(oracle::StateProbability(mdp, all, H - 1, 0)));
      CHECK(LockHitProbability(*env.cls, 0, mixture) == doctest::Approx(std::pow(0.5, H)));
    }
  }
}

TEST_CASE("sufficient statistic modes") {
  const auto env = MakeCompleteClass(BuiltinChainFixture("chain2"), 0);
  const auto s = SufficientStatisticOf(env.truth(), StatisticMode::kModel);
  CHECK(SameModel(std::get<Model>(s), env.truth()));
  const auto q = SufficientStatisticOf(env.truth(), StatisticMode::kQFunction);
  CHECK(std::get<QFunction>(q) == OptimalQ(std::get<TabularMdp>(env.truth())));
}

TEST_CASE("malformed tables are rejected") {
  CHECK_THROWS_AS(TabularMdp(1, 1, 1, {1.0}, {0.5}, {0.0}), DomainError);
  CHECK_THROWS_AS(TabularMdp(1, 1, 1, {1.0}, {1.0}, {1.5}), DomainError);
  CHECK_THROWS_AS(TabularMdp(1, 2, 1, {1.0}, {1.0, 0.0, 0.0, 1.0}, {0.0, 0.0}), DomainError);
}
