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
#include <memory>

#include "doctest.h"
#include "instances.hpp"
#include "oracles.hpp"

#include "decbench/dec_solver.hpp"
#include "decbench/environments.hpp"
#include "decbench/errors.hpp"

using namespace decbench;
using instances::Instance;
using instances::MakeInstance;
using instances::RandomBandit;
using instances::RandomMdp;
using instances::Raw;

TEST_CASE("matrix game basics") {
  const PayoffMatrix rps{3, 3, {0, 1, -1, -1, 0, 1, 1, -1, 0}};
  const SaddleResult r = SolveMatrixGame(rps);
  CHECK(r.converged);
  CHECK(std::abs(r.value) <= 1e-12);
  for (double x : r.p) CHECK(x == doctest::Approx(1.0 / 3.0));
  CHECK(MaxRow(rps, r.p) == doctest::Approx(r.value));
  CHECK(MinColumn(rps, r.q) == doctest::Approx(r.lower_bound));

  // Rows: models. Column 1 is dominated for the minimizer.
  const PayoffMatrix g{2, 2, {1, 3, 2, 4}};
  const SaddleResult s = SolveMatrixGame(g);
  CHECK(s.value == doctest::Approx(2.0));
  CHECK(s.p[0] == doctest::Approx(1.0));

  SolverOptions mw;
  mw.method = SaddleMethod::kMultiplicativeWeights;
  mw.tol = 1e-12;
  mw.max_iters = 3;
  const PayoffMatrix skew{3, 3, {0.3, 1, -1, -1, 0.2, 1, 1, -1, 0.7}};
  const SaddleResult u = SolveMatrixGame(skew, mw);
  CHECK(!u.converged);
  CHECK(u.gap > 1e-12);
  CHECK(u.iterations == 3);
  mw.tol = 2e-2;
  mw.max_iters = 200000;
  const SaddleResult v = SolveMatrixGame(rps, mw);
  CHECK(v.converged);
  CHECK(std::abs(v.value) <= 2e-2);
}

TEST_CASE("objective vanishes at the truth in optimistic mode") {
  const auto env = MakeEnvironment("complete(chain2)", 1);
  for (const char* key : {"sq", "hellinger", "bilinear", "sbe"}) {
    const Divergence d = Divergence::FromKey(key);
    const StatisticSpace stats = env.Statistics(d.accepts_q_functions() ? StatisticMode::kQFunction
                                                                        : StatisticMode::kModel);
    std::vector<double> mu(stats.size(), 0.0);
    // The truth's statistic: the model itself or its optimal Q.
    for (std::size_t i = 0; i < stats.size(); ++i) {
      const bool match = stats.mode() == StatisticMode::kModel
                             ? SameModel(std::get<Model>(stats[i]), env.truth())
                             : std::get<QFunction>(stats[i]) == OptimalQ(std::get<TabularMdp>(env.truth()));
      if (match) mu[i] = 1.0;
    }
    REQUIRE(std::count(mu.begin(), mu.end(), 1.0) == 1);
    std::vector<double> p(env.cls->decisions().size(), 0.0);
    p[OptimalDecision(env.truth(), env.cls->decisions())] = 1.0;
    CHECK(std::abs(DecObjective(*env.cls, stats, p, mu, env.true_model, 3.0, d, DecMode::kOptimistic)) <=
          1e-12);
  }
}

TEST_CASE("singleton class") {
  BanditModel b{{FiniteDistribution::PointMass(0.2), FiniteDistribution::PointMass(0.6)}};
  const auto env = MakeBanditClass({b}, {"x", "y"});
  const StatisticSpace stats = env.Statistics(StatisticMode::kModel);
  const Divergence d = Divergence::Squared();
  const SaddleResult r = SolveDec(*env.cls, stats, {1.0}, 2.0, d, DecMode::kOptimistic);
  CHECK(std::abs(r.value) <= 1e-12);
  CHECK(r.p[1] == doctest::Approx(1.0));
  const DecInstance instance(*env.cls, stats, d);
  CHECK(std::abs(DecBruteforce(instance, {1.0}, 2.0, DecMode::kOptimistic, 1e-3).value) <= 1e-12);
  Rng rng(1);
  CHECK(std::abs(OdecSupEstimate(instance, 2.0, 20, rng).lower_bound) <= 1e-12);
  CHECK(std::abs(CertificateValue(*env.cls, stats, {1.0}, 2.0, d, DecMode::kOptimistic,
                                  PosteriorSamplingCertificate{})) <= 1e-12);
}

TEST_CASE("two decisions and two models match the grid") {
  Rng rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Model> ms = {RandomBandit(rng, 2), RandomBandit(rng, 2)};
    const ModelClass cls(DecisionSpace::Arms({"a", "b"}), ms);
    const StatisticSpace stats = StatisticSpace::Models(cls);
    const double w = rng.Uniform();
    const std::vector<double> mu = {w, 1.0 - w};
    for (DecMode mode : {DecMode::kPlain, DecMode::kOptimistic}) {
      const SaddleResult r = SolveDec(cls, stats, mu, 2.0, Divergence::Squared(), mode);
      const auto c = oracle::Coefficients(cls, Raw(stats), mu, 2.0, "sq", mode == DecMode::kOptimistic);
      const auto grid = oracle::GridDec(c, 1e-6);
      CHECK(std::abs(r.value - grid.value) <= 1e-6 + grid.slack);
      const DecInstance instance(cls, stats, Divergence::Squared());
      CHECK(std::abs(DecBruteforce(instance, mu, 2.0, mode, 1e-3).value - r.value) <= 1e-6 + 1e-3);
    }
  }
}

TEST_CASE("solver agrees with the independent grid oracle") {
  Rng root(77);
  const char* keys[] = {"sq", "hellinger", "bilinear", "sbe"};
  int k = 0;
  for (int trial = 0; trial < 24; ++trial) {
    Rng rng = root.Split(trial);
    const Instance inst = MakeInstance(rng, keys[trial % 4]);
    const Divergence d = Divergence::FromKey(inst.key);
    const DecInstance instance(*inst.cls, inst.stats, d);
    const auto mu = rng.Dirichlet(inst.stats.size(), 1.0);
    for (DecMode mode : {DecMode::kPlain, DecMode::kOptimistic}) {
      const double gamma = std::vector<double>{0.5, 2.0, 8.0}[k++ % 3];
      const SaddleResult r = SolveDec(instance, mu, gamma, mode);
      REQUIRE(r.converged);
      const auto c = oracle::Coefficients(*inst.cls, Raw(inst.stats), mu, gamma, inst.key,
                                          mode == DecMode::kOptimistic);
      // The reported value is the true sup over models at the returned p.
      CHECK(r.value == doctest::Approx(oracle::MaxOver(c, r.p)).epsilon(1e-9));
      const auto grid = oracle::GridDec(c, 0.01);
      CHECK(r.value <= grid.value + 1e-9);
      CHECK(grid.value - grid.slack <= r.value + 1e-9);
      CHECK(r.lower_bound <= r.value + 1e-12);
      CHECK(std::abs(DecBruteforce(instance, mu, gamma, mode, 0.01).value - grid.value) <= 1e-9);
    }
  }
}

TEST_CASE("argument checks") {
  const auto env = MakeEnvironment("bandit(bernoulli3)");
  const StatisticSpace stats = env.Statistics(StatisticMode::kModel);
  const Divergence d = Divergence::Squared();
  const std::vector<double> mu(stats.size(), 1.0 / stats.size());
  CHECK_THROWS_AS(SolveDec(*env.cls, stats, mu, 0.0, d, DecMode::kOptimistic), DomainError);
  CHECK_THROWS_AS(SolveDec(*env.cls, stats, mu, -1.0, d, DecMode::kPlain), DomainError);
  CHECK_NOTHROW(SolveDec(*env.cls, stats, mu, 0.0, d, DecMode::kPlain));
  CHECK_THROWS_AS(SolveDec(*env.cls, stats, {0.5, 0.5}, 1.0, d, DecMode::kPlain), DomainError);
  // Bilinear needs Q statistics.
  CHECK_THROWS_AS(DecInstance(*env.cls, stats, Divergence::Bilinear()), UnsupportedError);

  const auto lock = MakeLockFamily(3, 1.0, 0);
  const DecInstance big(*lock.cls, lock.Statistics(StatisticMode::kModel), Divergence::Hellinger());
  std::vector<double> u(lock.cls->size(), 1.0 / lock.cls->size());
  CHECK_THROWS_AS(DecBruteforce(big, u, 1.0, DecMode::kPlain, 0.1), DomainError);

  const auto lstats = lock.Statistics(StatisticMode::kModel);
  CHECK_THROWS_AS(CertificateValue(*lock.cls, lstats, u, 1.0, Divergence::Hellinger(), DecMode::kOptimistic,
                                   ExplorationMixtureCertificate{0.75, {}}),
                  DomainError);
}

TEST_CASE("forced exploration certificate on ps-hard is at most 1/gamma") {
  const auto env = MakePsHardFamily(5, 0);
  const StatisticSpace stats = env.Statistics(StatisticMode::kModel);
  const std::size_t reveal = env.cls->decisions().IndexOf(std::string("const-a"));
  Rng rng(4);
  for (double gamma : {2.0, 8.0, 32.0}) {
    for (int probe = 0; probe < 10; ++probe) {
      auto mu = rng.Dirichlet(stats.size(), 0.5);
      if (probe == 0) std::fill(mu.begin(), mu.end(), 1.0 / stats.size());
      const double v = CertificateValue(*env.cls, stats, mu, gamma, Divergence::Hellinger(),
                                        DecMode::kOptimistic,
                                        ForcedExplorationCertificate{1.0 / gamma, reveal});
      CHECK(v <= 1.0 / gamma + 1e-12);
    }
  }
}
