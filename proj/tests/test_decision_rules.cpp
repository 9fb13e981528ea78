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

#include "decbench/decision_rules.hpp"
#include "decbench/errors.hpp"

using namespace decbench;

namespace {

BanditModel Deterministic(std::vector<double> means) {
  BanditModel b;
  for (double m : means) b.arms.push_back(FiniteDistribution::PointMass(m));
  return b;
}

RunConfig Base(Rule rule, std::size_t T) {
  RunConfig c;
  c.rule = rule;
  c.T = T;
  c.gamma = 2.0;
  c.environment = "test";
  return c;
}

}  // namespace

TEST_CASE("singleton class plays the optimum every round") {
  const auto env = MakeBanditClass({Deterministic({0.3, 0.8, 0.1})}, {"a", "b", "c"});
  for (Rule rule : {Rule::kE2d, Rule::kE2dOpt, Rule::kPosteriorSampling}) {
    RunConfig c = Base(rule, 25);
    const ExperimentRecord rec = Run(env, c);
    CHECK(rec.regret == 0.0);
    CHECK(rec.rows.size() == 25);
    for (const auto& e : rec.epochs) CHECK(e.p[1] == doctest::Approx(1.0));
    CHECK(rec.decision_counts[1] == 25);
  }
}

TEST_CASE("posterior pushforward") {
  const auto env = MakeBanditClass({Deterministic({0.9, 0.1}), Deterministic({0.1, 0.9})}, {"a", "b"});
  const StatisticSpace stats = env.Statistics(StatisticMode::kModel);
  const auto p = PosteriorPushforward(stats, {0.3, 0.7}, 2);
  CHECK(p[0] == doctest::Approx(0.3));
  CHECK(p[1] == doctest::Approx(0.7));

  const auto same = MakeBanditClass({Deterministic({0.9, 0.1}), Deterministic({0.8, 0.3})}, {"a", "b"});
  const auto q = PosteriorPushforward(same.Statistics(StatisticMode::kModel), {0.3, 0.7}, 2);
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(q[1] == 0.0);
}

TEST_CASE("config validation") {
  RunConfig c = Base(Rule::kE2dOpt, 10);
  CHECK_NOTHROW(c.Validate());
  c.T = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = Base(Rule::kE2dOptBatched, 10);
  c.n = 3;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = Base(Rule::kE2dOpt, 10);
  c.n = 2;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = Base(Rule::kE2dOpt, 10);
  c.gamma = 0.0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c.rule = Rule::kE2d;
  CHECK_NOTHROW(c.Validate());
  c.delta = 1.0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  CHECK_THROWS_AS(ParseRule("thompson"), ConfigError);
  CHECK(ParseRule(RuleKey(Rule::kE2dOptBatched)) == Rule::kE2dOptBatched);
}

TEST_CASE("single epoch batched run plays one distribution") {
  const auto env = MakeEnvironment("lock(3,1)", 5);
  RunConfig c = Base(Rule::kE2dOptBatched, 16);
  c.n = 16;
  c.divergence = "bilinear";
  c.estimator.key = "ew-opt-bilinear";
  c.true_model = 5;
  const ExperimentRecord rec = Run(env, c);
  REQUIRE(rec.epochs.size() == 1);
  for (const auto& row : rec.rows) CHECK(row.epoch == rec.rows.front().epoch);
  CHECK(rec.decomposition_holds);
}

TEST_CASE("decomposition and row bookkeeping") {
  const auto env = MakeEnvironment("bandit(bernoulli3)", 1);
  RunConfig c = Base(Rule::kE2dOpt, 120);
  c.divergence = "sq";
  c.estimator.key = "ew-opt-sq";
  c.gamma = 10.0;
  c.true_model = 1;
  c.seed = 4;
  const ExperimentRecord rec = Run(env, c);
  CHECK(rec.decomposition_holds);
  CHECK(rec.chain_violations == 0);
  CHECK(rec.regret <= rec.decomposition_bound + 1e-9);
  double sum = 0.0;
  for (const auto& row : rec.rows) sum += row.inst_regret;
  CHECK(sum == doctest::Approx(rec.rows.back().cum_regret));
  double expected = 0.0;
  for (const auto& e : rec.epochs) expected += e.expected_regret;
  CHECK(rec.regret == doctest::Approx(expected));
  const double bound = c.n * rec.dec_value_sum + c.n * c.gamma * rec.ledger_total + c.T * c.solver.tol;
  CHECK(rec.decomposition_bound == doctest::Approx(bound));

  const nlohmann::json s = rec.Summary();
  CHECK(s.at("schema_version") == 1);
  CHECK(s.at("config").at("T") == 120);
  CHECK(s.at("seed") == 4);
  CHECK(s.contains("estimator_hyperparameters"));
  CHECK(s.at("decomposition").at("holds") == true);

  const ExperimentRecord again = Run(env, c);
  REQUIRE(again.rows.size() == rec.rows.size());
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    CHECK(again.rows[i].decision == rec.rows[i].decision);
    CHECK(again.rows[i].reward == rec.rows[i].reward);
  }
}

TEST_CASE("posterior sampling never plays the revealing decision") {
  const auto env = MakePsHardFamily(4, 2);
  RunConfig c = Base(Rule::kPosteriorSampling, 200);
  c.true_model = 2;
  const ExperimentRecord rec = Run(env, c);
  CHECK(rec.decision_counts.back() == 0);
  CHECK(rec.decomposition_holds);
  RunConfig o = Base(Rule::kE2dOpt, 200);
  o.true_model = 2;
  o.gamma = 10.0;
  CHECK(Run(env, o).regret < rec.regret);
}

TEST_CASE("unconverged solver aborts unless told to warn") {
  const auto env = MakeEnvironment("bandit(bernoulli3)");
  RunConfig c = Base(Rule::kE2dOpt, 5);
  c.divergence = "sq";
  c.estimator.key = "ew-opt-sq";
  c.solver.method = SaddleMethod::kMultiplicativeWeights;
  c.solver.max_iters = 2;
  c.solver.tol = 1e-12;
  CHECK_THROWS_AS(Run(env, c), UnconvergedError);
  c.warn_unconverged = true;
  const ExperimentRecord rec = Run(env, c);
  CHECK(rec.unconverged_epochs > 0);
  CHECK(rec.max_solver_gap > 0.0);
}

TEST_CASE("estimator and divergence must be compatible") {
  const auto env = MakeEnvironment("lock(3,1)");
  RunConfig c = Base(Rule::kE2dOpt, 5);
  c.divergence = "hellinger";
  c.estimator.key = "ew-opt-bilinear";
  CHECK_THROWS_AS(Run(env, c), ConfigError);
  c.estimator.key = "magic";
  CHECK_THROWS_AS(Run(env, c), ConfigError);
  c.estimator.key = "ew-indicator";
  c.true_model = 99;
  CHECK_THROWS_AS(Run(env, c), DomainError);
}
