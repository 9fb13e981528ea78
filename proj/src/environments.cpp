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

#include "decbench/environments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <regex>

#include "decbench/divergence.hpp"
#include "decbench/errors.hpp"
#include "decbench/serialization.hpp"

namespace decbench {
namespace {

constexpr int kLockS = 0;
constexpr int kLockT = 1;
constexpr int kLockMaxFullQ = 6;

std::string LockSequence(std::size_t bits, int horizon) {
  std::string s;
  for (int h = 0; h < horizon; ++h) s += ((bits >> h) & 1u) ? 'b' : 'a';
  return s;
}

std::vector<double> SelfLoops(int H, int S, int A) {
  std::vector<double> p(static_cast<std::size_t>(H) * S * A * S, 0.0);
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        p[((static_cast<std::size_t>(h) * S + s) * A + a) * S + s] = 1.0;
      }
    }
  }
  return p;
}

void SetMove(std::vector<double>& p, int S, int A, int h, int s, int a,
             int next) {
  double* row = &p[((static_cast<std::size_t>(h) * S + s) * A + a) * S];
  std::fill(row, row + S, 0.0);
  row[next] = 1.0;
}

using Layer = std::vector<double>;

void InsertUnique(std::vector<Layer>& set, Layer x) {
  if (std::find(set.begin(), set.end(), x) == set.end()) {
    set.push_back(std::move(x));
  }
}

}  // namespace

StatisticSpace Environment::Statistics(StatisticMode mode) const {
  if (mode == StatisticMode::kModel) return StatisticSpace::Models(*cls);
  if (!q_class) {
    throw UnsupportedError("environment '" + key + "' has no Q class");
  }
  return StatisticSpace::QFunctions(*cls, *q_class);
}

DecisionSpace PolicyDecisionSpace(const std::vector<QFunction>& qs,
                                  const std::vector<int>& constant_actions,
                                  int horizon, int num_states) {
  std::vector<PolicyTable> policies;
  for (const auto& q : qs) {
    PolicyTable p = q.GreedyPolicy();
    if (std::find(policies.begin(), policies.end(), p) == policies.end()) {
      policies.push_back(std::move(p));
    }
  }
  for (int a : constant_actions) {
    PolicyTable p = PolicyTable::Constant(horizon, num_states, a);
    if (std::find(policies.begin(), policies.end(), p) == policies.end()) {
      policies.push_back(std::move(p));
    }
  }
  std::vector<Decision> decisions;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    decisions.push_back({"pi" + std::to_string(i), -1, policies[i]});
  }
  return DecisionSpace(std::move(decisions));
}

Environment MakeBanditClass(std::vector<BanditModel> models,
                            std::vector<std::string> arm_labels,
                            std::size_t true_model) {
  for (std::size_t i = 0; i < models.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (SameModel(models[i], models[j])) {
        throw DomainError("bandit class contains a duplicate model");
      }
    }
  }
  std::vector<Model> ms(models.begin(), models.end());
  Environment env;
  env.key = "bandit";
  env.cls = std::make_shared<ModelClass>(DecisionSpace::Arms(arm_labels),
                                         std::move(ms));
  if (true_model >= env.cls->size()) {
    throw DomainError("true model index out of range");
  }
  env.true_model = true_model;
  return env;
}

Environment MakeLockFamily(int horizon, double delta, std::size_t true_model) {
  const int H = horizon, S = 2, A = 2;
  if (H < 2) throw DomainError("lock family needs H >= 2");
  if (!(delta > 0.0)) throw DomainError("lock family needs Delta > 0");
  if (delta > 1.0) throw DomainError("Delta > 1 violates reward normalization");
  if (H > 20) throw DomainError("lock family limited to H <= 20");
  const std::size_t count = std::size_t{1} << H;
  if (true_model >= count) throw DomainError("true model index out of range");

  std::vector<Model> models;
  std::vector<std::string> labels;
  std::vector<QFunction> stars;
  for (std::size_t bits = 0; bits < count; ++bits) {
    std::vector<double> p = SelfLoops(H, S, A);
    std::vector<double> r(static_cast<std::size_t>(H) * S * A, 0.0);
    for (int h = 0; h + 1 < H; ++h) {
      const int good = static_cast<int>((bits >> h) & 1u);
      SetMove(p, S, A, h, kLockS, good, kLockS);
      SetMove(p, S, A, h, kLockS, 1 - good, kLockT);
    }
    const int last = static_cast<int>((bits >> (H - 1)) & 1u);
    r[(static_cast<std::size_t>(H - 1) * S + kLockS) * A + last] = delta;
    TabularMdp mdp(H, S, A, {1.0, 0.0}, std::move(p), std::move(r));
    stars.push_back(OptimalQ(mdp));
    models.emplace_back(std::move(mdp));
    labels.push_back("M_" + LockSequence(bits, H));
  }

  std::vector<QFunction> qs;
  if (H <= kLockMaxFullQ) {
    qs = stars;
  } else {
    // Subsample: the true model's Q* plus a fixed pseudo-random subset.
    Rng rng(0x10c4ULL + H);
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    for (std::size_t i = count - 1; i > 0; --i) {
      std::swap(order[i], order[rng() % (i + 1)]);
    }
    std::vector<std::size_t> keep(order.begin(),
                                  order.begin() + (std::size_t{1} << kLockMaxFullQ));
    if (std::find(keep.begin(), keep.end(), true_model) == keep.end()) {
      keep.back() = true_model;
    }
    std::sort(keep.begin(), keep.end());
    for (std::size_t i : keep) qs.push_back(stars[i]);
  }
  qs.push_back(QFunction::Zero(H, S, A));

  // Greedy policies of the lock Q's are exactly the action sequences at s.
  std::vector<Decision> decisions;
  for (const auto& q : qs) {
    PolicyTable p = q.GreedyPolicy();
    bool seen = false;
    for (const auto& d : decisions) seen = seen || *d.policy == p;
    if (seen) continue;
    std::size_t bits = 0;
    for (int h = 0; h < H; ++h) {
      bits |= static_cast<std::size_t>(p.Action(h, kLockS)) << h;
    }
    decisions.push_back({LockSequence(bits, H), -1, std::move(p)});
  }

  Environment env;
  env.key = "lock(" + std::to_string(H) + "," + nlohmann::json(delta).dump() + ")";
  env.cls = std::make_shared<ModelClass>(DecisionSpace(std::move(decisions)),
                                         std::move(models), std::move(labels));
  env.true_model = true_model;
  env.q_class = std::move(qs);
  env.metadata = {
      {"family", "lock"},
      {"H", H},
      {"Delta", delta},
      {"num_models", count},
      {"num_q", env.q_class->size()},
      {"q_subsampled", H > kLockMaxFullQ},
      {"suboptimality_identity", "f(pi_M) - f(pi) = Delta * P(a_1:H != a)"},
      {"sbe_identity", "D_sbe(0 || M_a) = Delta^2 * P(a_1:H = a)"}};
  return env;
}

double LockHitProbability(const ModelClass& lock, std::size_t model,
                          const PolicyMixture& policy) {
  const auto& mdp = std::get<TabularMdp>(lock.model(model));
  const int H = mdp.horizon(), A = mdp.num_actions();
  const Occupancy occ = OccupancyMeasures(mdp, policy);
  const int last = static_cast<int>((model >> (H - 1)) & 1u);
  return occ[H - 1][kLockS * A + last];
}

Environment MakePsHardFamily(int horizon, std::size_t true_model) {
  const int H = horizon;
  if (H < 3) throw DomainError("ps-hard family needs H >= 3");
  if (H > 16) throw DomainError("ps-hard family limited to H <= 16");
  const int N = 1 << (H - 2);
  const int tree = (1 << (H - 1)) - 1;  // heap indices 1..tree
  const int S = 1 + tree + N, A = 2;
  const int first_leaf = 1 << (H - 2);
  if (true_model >= static_cast<std::size_t>(N)) {
    throw DomainError("true model index out of range");
  }

  std::vector<double> p = SelfLoops(H, S, A);
  SetMove(p, S, A, 0, 0, 1, 1);
  for (int k = 1; k < first_leaf; ++k) {
    const int layer = static_cast<int>(std::floor(std::log2(k))) + 1;
    SetMove(p, S, A, layer, k, 0, 2 * k);
    SetMove(p, S, A, layer, k, 1, 2 * k + 1);
  }
  std::vector<Model> models;
  std::vector<std::string> labels;
  for (int i = 0; i < N; ++i) {
    std::vector<double> pi = p;
    SetMove(pi, S, A, 0, 0, 0, 1 + tree + i);
    std::vector<double> r(static_cast<std::size_t>(H) * S * A, 0.0);
    for (int a = 0; a < A; ++a) {
      r[(static_cast<std::size_t>(H - 1) * S + first_leaf + i) * A + a] = 1.0;
    }
    models.emplace_back(TabularMdp(H, S, A, [&] {
      std::vector<double> d1(S, 0.0);
      d1[0] = 1.0;
      return d1;
    }(), std::move(pi), std::move(r)));
    labels.push_back("M" + std::to_string(i));
  }
  std::vector<Decision> decisions;
  for (int i = 0; i < N; ++i) {
    decisions.push_back({"leaf" + std::to_string(i), -1,
                         OptimalQ(std::get<TabularMdp>(models[i])).GreedyPolicy()});
  }
  decisions.push_back({"const-a", -1, PolicyTable::Constant(H, S, 0)});

  Environment env;
  env.key = "ps-hard(" + std::to_string(H) + ")";
  env.cls = std::make_shared<ModelClass>(DecisionSpace(std::move(decisions)),
                                         std::move(models), std::move(labels));
  env.true_model = true_model;
  env.metadata = {
      {"family", "ps-hard"},
      {"H", H},
      {"N", N},
      {"num_states", S},
      {"actions", {"a", "b"}},
      {"reveal_decision", N},
      {"action_arity",
       "two actions; the third action of the original statement has no "
       "distinct behavior in the construction and is omitted"}};
  return env;
}

Environment MakeCompleteClass(std::vector<TabularMdp> models,
                              std::size_t true_model, std::size_t size_cap) {
  if (models.empty() || true_model >= models.size()) {
    throw DomainError("complete class: true model index out of range");
  }
  const TabularMdp& truth = models[true_model];
  const int H = truth.horizon(), S = truth.num_states(), A = truth.num_actions();
  if (S * A > 16 || H > 4) {
    throw DomainError("complete class limited to |S||A| <= 16 and H <= 4");
  }
  const std::size_t width = static_cast<std::size_t>(S) * A;
  const QFunction star = OptimalQ(truth);
  std::vector<std::vector<Layer>> layers(H);
  for (int h = 0; h < H; ++h) {
    InsertUnique(layers[h], Layer(star.values().begin() + h * width,
                                  star.values().begin() + (h + 1) * width));
    InsertUnique(layers[h], Layer(width, 0.0));
  }
  for (int h = H - 1; h >= 0; --h) {
    if (h == H - 1) {
      InsertUnique(layers[h], BellmanApply(truth, h, {}));
    } else {
      for (const auto& q : std::vector<Layer>(layers[h + 1])) {
        InsertUnique(layers[h], BellmanApply(truth, h, q));
      }
    }
  }
  std::size_t product = 1;
  for (const auto& l : layers) {
    product *= l.size();
    if (product > size_cap) {
      throw DomainError("complete class closure exceeds the size cap (" +
                        std::to_string(size_cap) + ")");
    }
  }
  for (int h = 0; h + 1 < H; ++h) {
    for (const auto& q : layers[h + 1]) {
      const Layer t = BellmanApply(truth, h, q);
      if (std::find(layers[h].begin(), layers[h].end(), t) == layers[h].end()) {
        throw DomainError("complete class: closure check failed");
      }
    }
  }
  std::vector<QFunction> qs;
  for (std::size_t idx = 0; idx < product; ++idx) {
    std::vector<double> values;
    std::size_t rest = idx;
    for (int h = 0; h < H; ++h) {
      const auto& l = layers[h][rest % layers[h].size()];
      rest /= layers[h].size();
      values.insert(values.end(), l.begin(), l.end());
    }
    QFunction q(H, S, A, std::move(values));
    if (!q.InUnitInterval()) {
      throw DomainError("complete class: backups leave [0, 1]");
    }
    qs.push_back(std::move(q));
  }
  std::vector<int> constants;
  for (int a = 0; a < A; ++a) constants.push_back(a);
  DecisionSpace decisions = PolicyDecisionSpace(qs, constants, H, S);
  std::vector<Model> ms(models.begin(), models.end());

  Environment env;
  env.key = "complete";
  env.cls = std::make_shared<ModelClass>(std::move(decisions), std::move(ms));
  env.true_model = true_model;
  nlohmann::json sizes = nlohmann::json::array();
  for (const auto& l : layers) sizes.push_back(l.size());
  env.metadata = {{"family", "complete"},
                  {"layer_sizes", sizes},
                  {"num_q", qs.size()},
                  {"deterministic_truth", truth.IsDeterministic()}};
  env.q_class = std::move(qs);
  return env;
}

std::vector<TabularMdp> BuiltinChainFixture(const std::string& name) {
  const int H = 3, S = 2, A = 2;
  // Action 0 stays, action 1 switches state; the variants perturb the
  // switch probability and the final-layer rewards.
  auto build = [&](double slip, double final_bonus, bool swapped) {
    std::vector<double> p(static_cast<std::size_t>(H) * S * A * S, 0.0);
    for (int h = 0; h < H; ++h) {
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          const bool switches = (a == 1) != swapped;
          const int target = switches ? 1 - s : s;
          double* row = &p[((static_cast<std::size_t>(h) * S + s) * A + a) * S];
          row[target] += 1.0 - slip;
          row[1 - target] += slip;
        }
      }
    }
    std::vector<double> r = {0.0, 0.1, 0.0, 0.0,
                             0.1, 0.0, 0.2, 0.0,
                             0.3, 0.0, 0.0, final_bonus};
    return TabularMdp(H, S, A, {1.0, 0.0}, std::move(p), std::move(r));
  };
  if (name == "chain2") {
    return {build(0.0, 0.6, false), build(0.0, 0.6, true),
            build(0.0, 0.1, false)};
  }
  if (name == "chain2-noisy") {
    return {build(0.2, 0.6, false), build(0.2, 0.6, true),
            build(0.2, 0.1, false)};
  }
  throw DomainError("unknown chain fixture '" + name + "'");
}

std::vector<BanditModel> BuiltinBanditFixture(const std::string& name) {
  if (name != "bernoulli3") {
    throw DomainError("unknown bandit fixture '" + name + "'");
  }
  auto bern = [](double m) { return FiniteDistribution{{0.0, 1.0}, {1.0 - m, m}}; };
  std::vector<BanditModel> models;
  for (int best = 0; best < 3; ++best) {
    BanditModel b;
    for (int arm = 0; arm < 3; ++arm) b.arms.push_back(bern(arm == best ? 0.7 : 0.4));
    models.push_back(std::move(b));
  }
  models.push_back({{bern(0.4), bern(0.4), bern(0.4)}});
  return models;
}

Environment MakeEnvironment(const std::string& key, std::size_t true_model) {
  static const std::regex pattern(R"(^\s*([a-z\-]+)\s*\((.*)\)\s*$)");
  std::smatch match;
  if (!std::regex_match(key, match, pattern)) {
    throw DomainError("malformed environment key '" + key + "'");
  }
  const std::string family = match[1];
  std::vector<std::string> args;
  {
    std::string current;
    for (char c : std::string(match[2])) {
      if (c == ',') {
        args.push_back(current);
        current.clear();
      } else if (c != ' ') {
        current += c;
      }
    }
    args.push_back(current);
  }
  auto number = [&](std::size_t i) {
    if (i >= args.size() || args[i].empty()) {
      throw DomainError("environment '" + key + "' is missing an argument");
    }
    std::size_t used = 0;
    double v = std::stod(args[i], &used);
    if (used != args[i].size()) {
      throw DomainError("environment '" + key + "': bad number '" + args[i] + "'");
    }
    return v;
  };
  auto integer = [&](std::size_t i) {
    const double v = number(i);
    if (v != std::floor(v)) throw DomainError("environment '" + key + "': H must be an integer");
    return static_cast<int>(v);
  };
  Environment env;
  if (family == "lock") {
    if (args.size() != 2) throw DomainError("lock(H,Delta) takes two arguments");
    env = MakeLockFamily(integer(0), number(1), true_model);
  } else if (family == "ps-hard") {
    if (args.size() != 1) throw DomainError("ps-hard(H) takes one argument");
    env = MakePsHardFamily(integer(0), true_model);
  } else if (family == "bandit") {
    const std::string& arg = args.at(0);
    if (std::filesystem::exists(arg)) {
      ClassDocument doc = LoadClassDocument(arg);
      if (doc.cls->is_mdp()) throw DomainError("bandit(file) needs a bandit class");
      std::vector<BanditModel> models;
      for (const auto& m : doc.cls->models()) models.push_back(std::get<BanditModel>(m));
      std::vector<std::string> labels;
      for (const auto& d : doc.cls->decisions().decisions()) labels.push_back(d.label);
      env = MakeBanditClass(std::move(models), labels,
                            doc.true_model.value_or(true_model));
    } else {
      env = MakeBanditClass(BuiltinBanditFixture(arg), {"arm0", "arm1", "arm2"},
                            true_model);
    }
  } else if (family == "complete") {
    const std::string& arg = args.at(0);
    if (std::filesystem::exists(arg)) {
      ClassDocument doc = LoadClassDocument(arg);
      if (!doc.cls->is_mdp()) throw DomainError("complete(file) needs an MDP class");
      std::vector<TabularMdp> models;
      for (const auto& m : doc.cls->models()) models.push_back(std::get<TabularMdp>(m));
      env = MakeCompleteClass(std::move(models), doc.true_model.value_or(true_model));
    } else {
      env = MakeCompleteClass(BuiltinChainFixture(arg), true_model);
    }
  } else {
    throw DomainError("unknown environment family '" + family + "'");
  }
  env.key = key;
  return env;
}

}  // namespace decbench
