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

#include "decbench/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "decbench/errors.hpp"
#include "decbench/harness.hpp"

namespace decbench {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

std::string Fmt(double x) {
  std::ostringstream out;
  out.precision(6);
  out << x;
  return out.str();
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

FiniteDistribution RandomDistribution(Rng& rng, std::size_t max_support) {
  const std::size_t k = 1 + rng() % max_support;
  FiniteDistribution d;
  std::vector<double> w = rng.Dirichlet(k, 1.0);
  for (std::size_t i = 0; i < k; ++i) {
    d.support.push_back(0.99 * static_cast<double>(rng() % 5) / 4.0 + static_cast<double>(i) * 1e-3);
    d.probs.push_back(w[i]);
  }
  return d;
}

TabularMdp RandomMdp(Rng& rng, int H, int S, int A) {
  std::vector<double> p, r;
  for (int h = 0; h < H; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const std::vector<double> row = rng.Dirichlet(S, 0.7);
        p.insert(p.end(), row.begin(), row.end());
        r.push_back(rng.Uniform() / H);
      }
    }
  }
  std::vector<double> d1(S, 0.0);
  d1[0] = 1.0;
  return TabularMdp(H, S, A, d1, p, r);
}

QFunction RandomQ(Rng& rng, int H, int S, int A) {
  std::vector<double> v(static_cast<std::size_t>(H) * S * A);
  for (double& x : v) x = rng.Uniform();
  return QFunction(H, S, A, v);
}

PolicyTable RandomPolicy(Rng& rng, int H, int S, int A) {
  std::vector<int> a(static_cast<std::size_t>(H) * S);
  for (int& x : a) x = static_cast<int>(rng() % A);
  return PolicyTable(H, S, a);
}

std::vector<PolicyTable> DistinctPolicies(Rng& rng, std::size_t count, int H, int S,
                                          int A) {
  std::vector<PolicyTable> out;
  while (out.size() < count) {
    PolicyTable p = RandomPolicy(rng, H, S, A);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

std::vector<std::string> ReadDirFiles(const std::string& dir) {
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

std::string Slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string ScratchDir() {
  const fs::path dir = fs::temp_directory_path() /
                       ("decbench-verify-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir.string();
}

Environment WithTrueModel(const std::string& key, std::uint64_t seed) {
  Environment env = MakeEnvironment(key, 0);
  const std::size_t tm = SeededTrueModel(seed, env.cls->size());
  return tm == 0 ? env : MakeEnvironment(key, tm);
}

}  // namespace

bool Report::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string Report::Format() const {
  std::string out;
  for (const auto& c : checks) {
    out += std::string(c.passed ? "PASS" : "FAIL") + "  " + suite + "/" + c.name;
    if (!c.detail.empty()) out += "  (" + c.detail + ")";
    out += "\n";
  }
  return out;
}

std::vector<std::string> SuiteNames() {
  return {"divergences", "dec-oracle",    "exp-weights", "decomposition", "cheating",
          "lock-gap",    "bilinear-conc", "estimators",  "determinism"};
}

Report VerifyDivergences() {
  const auto start = Clock::now();
  Report report{"divergences", {}, 0.0};
  Rng rng(20260101);

  // Hellinger axioms on random triples of finite distributions.
  std::size_t nonneg = 0, symmetric = 0, range = 0, triangle = 0;
  double worst_triangle = -1e9;
  const std::size_t triples = 1000;
  for (std::size_t i = 0; i < triples; ++i) {
    const auto p = RandomDistribution(rng, 4), q = RandomDistribution(rng, 4),
               r = RandomDistribution(rng, 4);
    const double pq = HellingerSq(p, q), qp = HellingerSq(q, p);
    const double pr = HellingerSq(p, r), qr = HellingerSq(q, r);
    nonneg += pq >= 0.0 && pr >= 0.0 && qr >= 0.0;
    symmetric += std::abs(pq - qp) <= 1e-12;
    range += pq <= 2.0 + 1e-12;
    triangle += pr <= 2.0 * (pq + qr) + 1e-12;
    worst_triangle = std::max(worst_triangle, pr - 2.0 * (pq + qr));
  }
  report.checks.push_back({"hellinger-nonnegative", nonneg == triples,
                           std::to_string(nonneg) + "/" + std::to_string(triples)});
  report.checks.push_back({"hellinger-symmetric", symmetric == triples,
                           std::to_string(symmetric) + "/" + std::to_string(triples)});
  report.checks.push_back({"hellinger-range", range == triples,
                           std::to_string(range) + "/" + std::to_string(triples)});
  report.checks.push_back({"hellinger-triangle-C2", triangle == triples,
                           std::to_string(triangle) + "/" + std::to_string(triples) +
                               ", worst margin " + Fmt(worst_triangle)});

  // Non-negativity of every divergence through the Divergence interface.
  std::size_t div_nonneg = 0, div_total = 0;
  const Divergence sq = Divergence::Squared(), hel = Divergence::Hellinger();
  for (std::size_t i = 0; i < 200; ++i) {
    BanditModel a{{RandomDistribution(rng, 3)}}, b{{RandomDistribution(rng, 3)}};
    const Decision arm{"arm0", 0, std::nullopt};
    div_nonneg += sq(arm, Model(a), Model(b)) >= 0.0;
    div_nonneg += hel(arm, Model(a), Model(b)) >= 0.0;
    div_total += 2;
  }

  // D_bi <= D_sbe on random MDP probes.
  std::size_t dominated = 0;
  double worst_jensen = -1e9;
  const Divergence bi = Divergence::Bilinear(), sbe = Divergence::Sbe();
  for (std::size_t i = 0; i < 100; ++i) {
    const TabularMdp m = RandomMdp(rng, 3, 2, 2);
    const QFunction q = RandomQ(rng, 3, 2, 2);
    const Decision pi{"pi", -1, RandomPolicy(rng, 3, 2, 2)};
    const double vb = bi(pi, q, m), vs = sbe(pi, q, m);
    div_nonneg += vb >= 0.0;
    div_nonneg += vs >= 0.0;
    div_total += 2;
    dominated += vb <= vs + 1e-12;
    worst_jensen = std::max(worst_jensen, vb - vs);
  }
  report.checks.push_back({"all-nonnegative", div_nonneg == div_total,
                           std::to_string(div_nonneg) + "/" + std::to_string(div_total)});
  report.checks.push_back({"bilinear-below-sbe", dominated == 100,
                           std::to_string(dominated) + "/100, worst D_bi - D_sbe " +
                               Fmt(worst_jensen)});

  // D_bi(Q*) = D_sbe(Q*) = 0 on every constructed family.
  double worst_zero = 0.0;
  std::size_t evaluated = 0;
  std::vector<Environment> families;
  for (int H = 2; H <= 5; ++H) families.push_back(MakeLockFamily(H, 1.0, 0));
  for (int H = 3; H <= 6; ++H) families.push_back(MakePsHardFamily(H, 0));
  families.push_back(MakeEnvironment("complete(chain2)", 0));
  families.push_back(MakeEnvironment("complete(chain2-noisy)", 0));
  for (const auto& env : families) {
    for (std::size_t m = 0; m < env.cls->size(); ++m) {
      const auto& mdp = std::get<TabularMdp>(env.cls->model(m));
      const QFunction star = OptimalQ(mdp);
      for (const auto& d : env.cls->decisions().decisions()) {
        worst_zero = std::max({worst_zero, std::abs(bi(d, star, mdp)),
                               std::abs(sbe(d, star, mdp))});
        evaluated += 2;
      }
    }
  }
  report.checks.push_back({"zero-at-optimal-q", worst_zero <= 1e-10,
                           std::to_string(evaluated) + " evaluations, max " + Fmt(worst_zero)});
  report.seconds = Seconds(start);
  return report;
}

Report VerifyDecOracle() {
  const auto start = Clock::now();
  Report report{"dec-oracle", {}, 0.0};
  Rng rng(7);
  const std::vector<std::string> keys = {"sq", "hellinger", "bilinear", "sbe"};
  const double gammas[] = {0.5, 2.0, 8.0};
  const double mesh = 1e-3;
  const SolverOptions options;
  std::size_t agree = 0;
  double worst_margin = -1e9;
  const std::size_t instances = 60;
  for (std::size_t i = 0; i < instances; ++i) {
    const Divergence d = Divergence::FromKey(keys[i % 4]);
    const DecMode mode = (i / 4) % 2 == 0 ? DecMode::kPlain : DecMode::kOptimistic;
    const double gamma = gammas[(i / 8) % 3];
    const std::size_t num_decisions = 2 + rng() % 3, num_models = 2 + rng() % 3;
    std::shared_ptr<ModelClass> cls;
    std::optional<StatisticSpace> stats;
    if (d.accepts_q_functions()) {
      std::vector<Model> models;
      for (std::size_t m = 0; m < num_models; ++m) models.emplace_back(RandomMdp(rng, 2, 2, 2));
      std::vector<Decision> decisions;
      for (const auto& p : DistinctPolicies(rng, num_decisions, 2, 2, 2)) {
        decisions.push_back({"pi" + std::to_string(decisions.size()), -1, p});
      }
      cls = std::make_shared<ModelClass>(DecisionSpace(decisions), models);
      std::vector<QFunction> qs;
      for (const auto& m : models) qs.push_back(OptimalQ(std::get<TabularMdp>(m)));
      qs.push_back(RandomQ(rng, 2, 2, 2));
      stats = StatisticSpace::QFunctions(*cls, qs);
    } else {
      std::vector<Model> models;
      for (std::size_t m = 0; m < num_models; ++m) {
        BanditModel b;
        for (std::size_t a = 0; a < num_decisions; ++a) b.arms.push_back(RandomDistribution(rng, 3));
        models.emplace_back(b);
      }
      std::vector<std::string> labels;
      for (std::size_t a = 0; a < num_decisions; ++a) labels.push_back("arm" + std::to_string(a));
      cls = std::make_shared<ModelClass>(DecisionSpace::Arms(labels), models);
      stats = StatisticSpace::Models(*cls);
    }
    const DecInstance instance(*cls, *stats, d);
    const RandomizedEstimate mu = rng.Dirichlet(stats->size(), 1.0);
    const SaddleResult solved = SolveDec(instance, mu, gamma, mode, options);
    const BruteforceResult grid = DecBruteforce(instance, mu, gamma, mode, mesh);
    const double allowed = options.tol + grid.slack;
    const double diff = std::abs(solved.value - grid.value);
    agree += diff <= allowed;
    worst_margin = std::max(worst_margin, diff - allowed);
  }
  const double secs = Seconds(start);
  report.checks.push_back({"solver-matches-grid", agree == instances,
                           std::to_string(agree) + "/" + std::to_string(instances) +
                               ", worst |diff| - allowed " + Fmt(worst_margin)});
  report.checks.push_back({"runtime-under-60s", secs < 60.0, Fmt(secs) + " s"});
  report.seconds = secs;
  return report;
}

Report VerifyExpWeights() {
  const auto start = Clock::now();
  Report report{"exp-weights", {}, 0.0};
  struct Regime {
    const char* name;
    bool signed_losses;
    double eta;
  };
  const Regime regimes[] = {{"nonnegative-eta0.05", false, 0.05},
                            {"nonnegative-eta0.2", false, 0.2},
                            {"signed-eta0.05", true, 0.05},
                            {"signed-eta0.2", true, 0.2}};
  Rng root(424242);
  for (const auto& regime : regimes) {
    std::size_t violations = 0;
    double worst = -1e300;
    for (std::size_t seq = 0; seq < 100; ++seq) {
      Rng rng = root.Split(seq).Split(regime.signed_losses ? 1 : 0);
      const std::size_t G = 1 + rng() % 8, T = 1 + rng() % 200;
      // Signed losses bounded by L = 1/(2 eta); non-negative ones up to 5.
      const double L = regime.signed_losses ? 1.0 / (2.0 * regime.eta) : 5.0;
      ExponentialWeights ew(G, regime.eta);
      double learner = 0.0, second_moment = 0.0;
      std::vector<double> totals(G, 0.0);
      for (std::size_t t = 0; t < T; ++t) {
        std::vector<double> loss(G);
        for (double& l : loss) {
          l = regime.signed_losses ? L * (2.0 * rng.Uniform() - 1.0) : L * rng.Uniform();
        }
        const std::vector<double> q = ew.Distribution();
        for (std::size_t g = 0; g < G; ++g) {
          learner += q[g] * loss[g];
          second_moment += q[g] * loss[g] * loss[g];
          totals[g] += loss[g];
        }
        ew.Update(loss);
      }
      const double regret = learner - *std::min_element(totals.begin(), totals.end());
      const double log_g = std::log(static_cast<double>(G));
      const double bound = regime.signed_losses
                               ? 4.0 * regime.eta * second_moment + log_g / regime.eta
                               : regime.eta / 2.0 * second_moment + log_g / regime.eta;
      violations += regret > bound;
      worst = std::max(worst, regret - bound);
    }
    report.checks.push_back({regime.name, violations == 0,
                             std::to_string(violations) + " violations / 100, max regret - bound " +
                                 Fmt(worst)});
  }
  // Log-space stability at large cumulative losses.
  ExponentialWeights big(4, 1.0);
  big.Update({1e4, 1e4 + 1.0, 2e4, 0.5e4});
  const auto q = big.Distribution();
  double sum = 0.0;
  bool finite = true;
  for (double x : q) {
    sum += x;
    finite = finite && std::isfinite(x);
  }
  report.checks.push_back({"log-space-normalized", finite && std::abs(sum - 1.0) <= 1e-10,
                           "sum " + Fmt(sum)});
  report.seconds = Seconds(start);
  return report;
}

Report VerifyDecomposition(const std::string& scratch) {
  const auto start = Clock::now();
  Report report{"decomposition", {}, 0.0};
  std::size_t runs = 0, holds = 0, chain_ok = 0;
  double worst = -1e300;
  for (const auto& name : PresetNames()) {
    if (name == "lock-dec-gap") continue;
    const HarnessResult r = RunPreset(name, (fs::path(scratch) / name).string());
    std::size_t preset_holds = 0;
    for (const auto& s : r.runs) {
      ++runs;
      preset_holds += s.decomposition_holds;
      chain_ok += s.chain_violations == 0;
      worst = std::max(worst, s.regret - s.decomposition_bound);
    }
    holds += preset_holds;
    report.checks.push_back({name, preset_holds == r.runs.size(),
                             std::to_string(preset_holds) + "/" + std::to_string(r.runs.size()) +
                                 " runs"});
  }
  report.checks.push_back({"pathwise-bound", holds == runs && runs >= 30,
                           std::to_string(holds) + "/" + std::to_string(runs) +
                               " runs, max Reg - bound " + Fmt(worst)});
  report.checks.push_back({"per-epoch-chain", chain_ok == runs,
                           std::to_string(chain_ok) + "/" + std::to_string(runs) + " runs"});
  report.seconds = Seconds(start);
  return report;
}

Report VerifyCheating(const std::string& scratch) {
  const auto start = Clock::now();
  Report report{"cheating", {}, 0.0};
  const HarnessResult r = RunPreset("cheating-separation",
                                    (fs::path(scratch) / "cheating").string());
  const auto& j = r.report;
  const double ratio = j.at("regret_ratio").is_number() ? j.at("regret_ratio").get<double>()
                                                         : 1e300;
  const std::size_t seeds = j.at("seeds").size();
  report.checks.push_back(
      {"ratio", j.at("ratio_ok").get<bool>(),
       "PS mean " + Fmt(j.at("posterior_sampling_mean_regret").get<double>()) +
           ", E2D.Opt mean " + Fmt(j.at("e2d_opt_mean_regret").get<double>()) + ", ratio " +
           Fmt(ratio) + " >= " + Fmt(j.at("ratio_threshold").get<double>())});
  const std::size_t within = j.at("e2d_opt_within_regret_bound").get<std::size_t>();
  report.checks.push_back({"e2d-opt-regret-bound", within == seeds,
                           std::to_string(within) + "/" + std::to_string(seeds) +
                               " seeds <= C sqrt(T log S) = " +
                               Fmt(j.at("regret_bound").get<double>())});
  const std::size_t est = j.at("e2d_opt_within_estimation_bound").get<std::size_t>();
  report.checks.push_back({"estimation-error", 10 * est >= 9 * seeds,
                           std::to_string(est) + "/" + std::to_string(seeds) + " seeds <= " +
                               Fmt(j.at("estimation_error_bound").get<double>())});
  const std::size_t reveals = j.at("posterior_sampling_reveal_plays").get<std::size_t>();
  report.checks.push_back({"posterior-sampling-never-reveals", reveals == 0,
                           std::to_string(reveals) + " plays of the revealing action"});
  std::size_t holds = 0;
  for (const auto& s : r.runs) holds += s.decomposition_holds;
  report.checks.push_back({"decomposition", holds == r.runs.size(),
                           std::to_string(holds) + "/" + std::to_string(r.runs.size())});
  const double secs = Seconds(start);
  report.checks.push_back({"runtime-under-5min", secs < 300.0, Fmt(secs) + " s"});
  report.seconds = secs;
  return report;
}

Report VerifyLockGap(const std::string& scratch) {
  const auto start = Clock::now();
  Report report{"lock-gap", {}, 0.0};
  const HarnessResult r = RunPreset("lock-dec-gap", (fs::path(scratch) / "lock-gap").string());
  for (const auto& row : r.report.at("rows")) {
    if (!row.at("checked").get<bool>()) continue;
    const int H = row.at("H").get<int>();
    const double lb = row.at("dec_lower_bound").get<double>();
    const double thr = row.at("dec_threshold").get<double>() - 2e-3;
    const double cert = row.at("odec_certificate").get<double>();
    const double bound = row.at("fixture_bound").get<double>();
    const double factor = row.at("gap_factor").get<double>();
    const double need = std::ldexp(1.0, H - 2);
    report.checks.push_back({"H" + std::to_string(H) + "-dec-lower-bound", lb >= thr,
                             Fmt(lb) + " >= " + Fmt(thr)});
    report.checks.push_back({"H" + std::to_string(H) + "-odec-certificate", cert <= bound,
                             Fmt(cert) + " <= " + Fmt(bound)});
    report.checks.push_back({"H" + std::to_string(H) + "-gap-factor", factor >= need,
                             Fmt(factor) + " >= " + Fmt(need)});
  }
  report.seconds = Seconds(start);
  return report;
}

Report VerifyBilinearConcentration() {
  const auto start = Clock::now();
  Report report{"bilinear-conc", {}, 0.0};
  const double delta = 0.1, L = 2.0;
  const Environment env = MakeLockFamily(3, 1.0, 0);
  const auto& qs = *env.q_class;
  const auto& decisions = env.cls->decisions();
  const int H = env.cls->horizon();
  for (std::size_t n : {16, 64}) {
    const double radius =
        L * std::sqrt(2.0 * std::log(static_cast<double>(qs.size()) * H / delta) /
                      static_cast<double>(n));
    std::size_t covered = 0;
    double worst = 0.0;
    const std::size_t runs = 200;
    for (std::size_t seed = 1; seed <= runs; ++seed) {
      Rng rng = Rng(seed).Split(n);
      const std::size_t tm = SeededTrueModel(seed, env.cls->size());
      const auto& truth = std::get<TabularMdp>(env.cls->model(tm));
      const std::vector<double> p = rng.Dirichlet(decisions.size(), 1.0);
      Batch batch;
      for (std::size_t l = 0; l < n; ++l) {
        const std::size_t d = rng.Categorical(p);
        batch.push_back({d, Sample(truth, *decisions[d].policy, rng)});
      }
      bool inside = true;
      for (const auto& q : qs) {
        const std::vector<double> empirical = BatchDiscrepancy(q, batch);
        std::vector<double> exact(H, 0.0);
        for (std::size_t d = 0; d < decisions.size(); ++d) {
          const auto e = ExpectedDiscrepancy(truth, *decisions[d].policy, q, nullptr);
          for (int h = 0; h < H; ++h) exact[h] += p[d] * e[h];
        }
        for (int h = 0; h < H; ++h) {
          const double dev = std::abs(empirical[h] - exact[h]);
          worst = std::max(worst, dev / radius);
          inside = inside && dev <= radius;
        }
      }
      covered += inside;
    }
    const double freq = static_cast<double>(covered) / runs;
    report.checks.push_back({"coverage-n" + std::to_string(n), freq >= 1.0 - delta,
                             "frequency " + Fmt(freq) + " >= " + Fmt(1.0 - delta) +
                                 ", radius " + Fmt(radius) + ", max dev/radius " + Fmt(worst)});
  }
  report.seconds = Seconds(start);
  return report;
}

Report VerifyEstimators() {
  const auto start = Clock::now();
  Report report{"estimators", {}, 0.0};

  // Realized offset loss vanishes at (T*Q, Q) on deterministic complete classes.
  std::size_t pairs = 0, zero = 0, closed = 0;
  for (std::size_t tm = 0; tm < 3; ++tm) {
    const Environment env = MakeEnvironment("complete(chain2)", tm);
    const auto& truth = std::get<TabularMdp>(env.truth());
    const auto& decisions = env.cls->decisions();
    Rng rng = Rng(99).Split(tm);
    for (const auto& q : *env.q_class) {
      const QFunction g = BellmanBackup(truth, q);
      closed += std::find(env.q_class->begin(), env.q_class->end(), g) != env.q_class->end();
      for (int b = 0; b < 5; ++b) {
        Batch batch;
        for (int h = 0; h < truth.horizon(); ++h) {
          const std::size_t d = rng() % decisions.size();
          batch.push_back({d, Sample(truth, *decisions[d].policy, rng)});
        }
        ++pairs;
        zero += RealizedOffsetLoss(truth, g, q, batch) == 0.0;
      }
    }
  }
  report.checks.push_back({"offset-loss-zero-at-backup", zero == pairs,
                           std::to_string(zero) + "/" + std::to_string(pairs) + " exact zeros"});
  report.checks.push_back({"backup-closed", closed * 5 == pairs,
                           std::to_string(closed) + " members map into the class"});

  // Est_opt(gamma) per epoch decreasing over K in {50, 100, 200}.
  struct Case {
    std::string name, env, div, est;
    std::size_t n;
    double gamma;
    std::optional<double> eta;
    Rule rule;
  };
  const std::vector<Case> cases = {
      {"two-timescale", "complete(chain2)", "sbe", "two-timescale", 3, 4.0, 1.0,
       Rule::kE2dOptBatched},
      {"ew-opt-bilinear", "lock(3,1)", "bilinear", "ew-opt-bilinear", 8, 4.0, 1.0,
       Rule::kE2dOptBatched},
      {"ew-opt-sq", "bandit(bernoulli3)", "sq", "ew-opt-sq", 1, 10.0, std::nullopt,
       Rule::kE2dOpt}};
  for (const auto& c : cases) {
    std::vector<double> means;
    std::string detail;
    for (std::size_t K : {50, 100, 200}) {
      double total = 0.0;
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RunConfig cfg;
        cfg.rule = c.rule;
        cfg.n = c.n;
        cfg.T = K * c.n;
        cfg.gamma = c.gamma;
        cfg.divergence = c.div;
        cfg.estimator.key = c.est;
        cfg.estimator.eta = c.eta;
        cfg.environment = c.env;
        cfg.seed = seed;
        const Environment env = WithTrueModel(c.env, seed);
        cfg.true_model = env.true_model;
        total += Run(env, cfg).ledger_total / static_cast<double>(K);
      }
      means.push_back(total / 5.0);
      detail += (detail.empty() ? "" : ", ") + std::string("K=") + std::to_string(K) + ": " +
                Fmt(means.back());
    }
    const bool decreasing = means[1] < means[0] && means[2] < means[1];
    report.checks.push_back({c.name + "-est-opt-trend", decreasing, detail});
  }

  // predict() normalization.
  const Environment lock = MakeLockFamily(3, 1.0, 0);
  BilinearParams params;
  params.gamma = 2.0;
  params.epochs = 10;
  EwOptimisticBilinear bil(lock.cls, *lock.q_class, params);
  double sum = 0.0;
  for (double x : bil.Predict()) sum += x;
  report.checks.push_back({"predict-normalized", std::abs(sum - 1.0) <= 1e-10,
                           "sum " + Fmt(sum)});
  report.seconds = Seconds(start);
  return report;
}

Report VerifyDeterminism(const std::string& scratch) {
  const auto start = Clock::now();
  Report report{"determinism", {}, 0.0};
  for (const auto& name : PresetNames()) {
    const std::string a = (fs::path(scratch) / "det-a" / name).string();
    const std::string b = (fs::path(scratch) / "det-b" / name).string();
    RunPreset(name, a);
    RunPreset(name, b);
    const auto files_a = ReadDirFiles(a), files_b = ReadDirFiles(b);
    std::size_t csvs = 0, identical = 0;
    bool same_names = files_a == files_b;
    for (const auto& f : files_a) {
      if (f.size() < 4 || f.substr(f.size() - 4) != ".csv") continue;
      ++csvs;
      identical += same_names && Slurp((fs::path(a) / f).string()) ==
                                     Slurp((fs::path(b) / f).string());
    }
    report.checks.push_back({name, same_names && csvs > 0 && identical == csvs,
                             std::to_string(identical) + "/" + std::to_string(csvs) +
                                 " CSVs byte-identical"});
  }
  report.seconds = Seconds(start);
  return report;
}

std::vector<Report> Verify(const std::string& suite) {
  const std::string scratch = ScratchDir();
  std::vector<Report> out;
  auto run = [&](const std::string& name) {
    if (name == "divergences") out.push_back(VerifyDivergences());
    else if (name == "dec-oracle") out.push_back(VerifyDecOracle());
    else if (name == "exp-weights") out.push_back(VerifyExpWeights());
    else if (name == "decomposition") out.push_back(VerifyDecomposition(scratch));
    else if (name == "cheating") out.push_back(VerifyCheating(scratch));
    else if (name == "lock-gap") out.push_back(VerifyLockGap(scratch));
    else if (name == "bilinear-conc") out.push_back(VerifyBilinearConcentration());
    else if (name == "estimators") out.push_back(VerifyEstimators());
    else if (name == "determinism") out.push_back(VerifyDeterminism(scratch));
  };
  const auto names = SuiteNames();
  if (suite == "all") {
    for (const auto& n : names) run(n);
  } else if (std::find(names.begin(), names.end(), suite) != names.end()) {
    run(suite);
  } else {
    std::error_code ec;
    fs::remove_all(scratch, ec);
    throw ConfigError("unknown verify suite '" + suite + "'");
  }
  std::error_code ec;
  fs::remove_all(scratch, ec);
  return out;
}

}  // namespace decbench
