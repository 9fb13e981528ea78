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

#include <filesystem>

#include "doctest.h"

#include "decbench/divergence.hpp"
#include "decbench/environments.hpp"
#include "decbench/errors.hpp"
#include "decbench/serialization.hpp"

using namespace decbench;

namespace {

BanditModel Deterministic(std::vector<double> means) {
  BanditModel b;
  for (double m : means) b.arms.push_back(FiniteDistribution::PointMass(m));
  return b;
}

bool Contains(const std::vector<QFunction>& qs, const QFunction& q) {
  for (const auto& x : qs) {
    if (x == q) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("bandit classes") {
  const auto two = MakeBanditClass({Deterministic({0.1, 0.9}), Deterministic({0.9, 0.1})}, {"l", "r"}, 1);
  CHECK(two.cls->size() == 2);
  CHECK(two.true_model == 1);

  std::vector<BanditModel> grid;
  for (int k = 1; k <= 9; ++k) {
    const double m = k / 10.0;
    grid.push_back({{FiniteDistribution{{0.0, 1.0}, {1.0 - m, m}}}});
  }
  CHECK(MakeBanditClass(grid, {"arm"}).cls->size() == 9);

  CHECK_THROWS_AS(MakeBanditClass({Deterministic({0.5}), Deterministic({0.5})}, {"a"}), DomainError);
  CHECK_THROWS_AS(MakeBanditClass({Deterministic({0.5})}, {"a"}, 3), DomainError);
  CHECK_THROWS_AS(MakeBanditClass({{{FiniteDistribution{{0.5}, {0.7}}}}}, {"a"}), DomainError);
}

TEST_CASE("lock family") {
  CHECK_THROWS_AS(MakeLockFamily(3, 1.5), DomainError);
  CHECK_THROWS_AS(MakeLockFamily(3, 0.0), DomainError);
  const auto env = MakeLockFamily(4, 0.5, 6);
  CHECK(env.cls->size() == 16);
  CHECK(env.cls->decisions().size() == 16);
  CHECK(env.cls->deterministic());
  REQUIRE(env.q_class);
  CHECK(Contains(*env.q_class, QFunction::Zero(4, 2, 2)));
  for (std::size_t m = 0; m < env.cls->size(); ++m) {
    const auto& mdp = std::get<TabularMdp>(env.cls->model(m));
    CHECK(Contains(*env.q_class, OptimalQ(mdp)));
    // Exactly one decision opens the lock.
    int winners = 0;
    for (const auto& d : env.cls->decisions().decisions()) winners += MeanReward(mdp, *d.policy) > 0.0;
    CHECK(winners == 1);
    CHECK(OptimalValue(env.cls->model(m), env.cls->decisions()) == doctest::Approx(0.5));
  }
  // Large horizons subsample the Q class but keep the truth.
  const auto big = MakeLockFamily(8, 1.0, 77);
  CHECK(big.q_class->size() <= 65);
  CHECK(Contains(*big.q_class, OptimalQ(std::get<TabularMdp>(big.truth()))));
}

TEST_CASE("ps-hard family") {
  const auto env = MakePsHardFamily(6, 3);
  CHECK(env.cls->size() == 16);
  CHECK(env.cls->decisions().size() == 17);
  CHECK(env.metadata.at("reveal_decision") == 16);
  const Decision& reveal = env.cls->decisions()[16];
  for (std::size_t i = 0; i < env.cls->size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      CHECK(HellingerDivergence(reveal, env.cls->model(i), env.cls->model(j)) == 2.0);
    }
    // The revealing decision earns nothing.
    CHECK(MeanReward(env.cls->model(i), reveal) == 0.0);
  }
  CHECK_THROWS_AS(MakePsHardFamily(2), DomainError);
}

TEST_CASE("Bellman-complete classes") {
  for (const char* name : {"chain2", "chain2-noisy"}) {
    for (std::size_t truth = 0; truth < 3; ++truth) {
      const auto env = MakeCompleteClass(BuiltinChainFixture(name), truth);
      REQUIRE(env.q_class);
      const auto& mdp = std::get<TabularMdp>(env.truth());
      CHECK(Contains(*env.q_class, OptimalQ(mdp)));
      for (const auto& q : *env.q_class) CHECK(Contains(*env.q_class, BellmanBackup(mdp, q)));
    }
  }
  CHECK_THROWS_AS(MakeCompleteClass(BuiltinChainFixture("chain2"), 0, 2), DomainError);
}

TEST_CASE("environment keys") {
  CHECK(MakeEnvironment("lock(3,1)").cls->size() == 8);
  CHECK(MakeEnvironment("ps-hard(4)").cls->size() == 4);
  CHECK(MakeEnvironment("bandit(bernoulli3)", 3).true_model == 3);
  CHECK(MakeEnvironment("complete(chain2)").q_class.has_value());
  CHECK_THROWS_AS(MakeEnvironment("maze(3)"), DomainError);
  CHECK_THROWS_AS(MakeEnvironment("lock(3"), DomainError);
  CHECK_THROWS_AS(MakeEnvironment("bandit(nonexistent)"), DomainError);

  const auto dir = std::filesystem::temp_directory_path() / "decbench-env-test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "two.json").string();
  const auto two = MakeBanditClass({Deterministic({0.1, 0.9}), Deterministic({0.9, 0.1})}, {"l", "r"});
  SaveClassDocument({two.cls, std::nullopt, std::nullopt}, path);
  const auto loaded = MakeEnvironment("bandit(" + path + ")", 1);
  CHECK(loaded.cls->size() == 2);
  CHECK(loaded.true_model == 1);
  std::filesystem::remove_all(dir);
}
