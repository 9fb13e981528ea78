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

#include "decbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <filesystem>
#include <mutex>
#include <thread>

#include "decbench/errors.hpp"
#include "decbench/serialization.hpp"

namespace decbench {
namespace {

namespace fs = std::filesystem;

std::string Join(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

void AppendUnsigned(std::string& out, std::size_t v) {
  char buf[24];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

RunConfig CheatingConfig(std::size_t T, std::uint64_t seed, Rule rule) {
  RunConfig c;
  c.name = "cheating-separation";
  c.rule = rule;
  c.T = T;
  c.gamma = CheatingGamma(T, std::size_t{1} << (DefaultCheatingFixture().horizon - 2));
  c.divergence = "hellinger";
  c.estimator.key = "ew-indicator";
  c.estimator.eta = 1.0;
  c.environment = "ps-hard(" + std::to_string(DefaultCheatingFixture().horizon) + ")";
  c.seed = seed;
  c.delta = DefaultCheatingFixture().delta;
  return c;
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

std::vector<std::uint64_t> SeedsOr(const PresetOptions& o,
                                   std::vector<std::uint64_t> fallback) {
  return o.seeds.empty() ? fallback : o.seeds;
}

std::vector<std::uint64_t> Range(std::uint64_t lo, std::uint64_t hi) {
  std::vector<std::uint64_t> v;
  for (auto s = lo; s <= hi; ++s) v.push_back(s);
  return v;
}

// Runs `configs` in parallel on fresh environments; results keep input order.
std::vector<RunSummary> RunAll(const std::vector<RunConfig>& configs,
                               const std::vector<std::string>& stems,
                               const std::string& out_dir, std::size_t jobs,
                               bool random_true_model = false) {
  std::vector<RunSummary> out(configs.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    tasks.push_back([&, i] {
      RunConfig c = configs[i];
      // Q classes depend on the true model, so rebuild once it is known.
      Environment env = MakeEnvironment(c.environment, random_true_model ? 0 : c.true_model);
      if (random_true_model) {
        const std::size_t tm = SeededTrueModel(c.seed, env.cls->size());
        if (tm != env.true_model) env = MakeEnvironment(c.environment, tm);
      }
      c.true_model = env.true_model;
      out[i] = WriteRun(Run(env, c), out_dir, stems[i]);
    });
  }
  RunParallel(tasks, jobs);
  return out;
}

void Collect(HarnessResult& result, const std::vector<RunSummary>& runs) {
  for (const auto& r : runs) {
    result.runs.push_back(r);
    result.files.push_back(r.csv_path);
    result.ok = result.ok && r.decomposition_holds && r.chain_violations == 0;
  }
}

HarnessResult CheatingSeparation(const std::string& out_dir,
                                 const PresetOptions& options) {
  const CheatingFixture fx = DefaultCheatingFixture();
  const std::size_t T = options.T.value_or(fx.T);
  const auto seeds = SeedsOr(options, Range(1, 10));
  std::vector<RunConfig> configs;
  std::vector<std::string> stems;
  for (auto seed : seeds) {
    for (Rule rule : {Rule::kPosteriorSampling, Rule::kE2dOpt}) {
      configs.push_back(CheatingConfig(T, seed, rule));
      stems.push_back("cheating-separation_seed" + std::to_string(seed) + "_" +
                      RuleKey(rule));
    }
  }
  HarnessResult result;
  const auto runs = RunAll(configs, stems, out_dir, options.jobs, true);
  Collect(result, runs);

  const Environment env = MakePsHardFamily(fx.horizon, 0);
  const double log_m = std::log(static_cast<double>(env.cls->size()));
  const double num_states = env.cls->num_states();
  const double regret_scale = std::sqrt(static_cast<double>(T) * std::log(num_states));
  const double regret_bound = fx.regret_constant * regret_scale;
  const double freedman_bound = 2.0 * (2.0 * (2.0 * log_m) + 8.0 * std::log(1.0 / fx.delta));

  std::vector<double> ps, opt;
  std::size_t within_regret = 0, within_est = 0, within_realized = 0;
  std::size_t ps_reveals = 0;
  nlohmann::json per_seed = nlohmann::json::array();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const RunSummary& a = runs[2 * i];
    const RunSummary& b = runs[2 * i + 1];
    const std::size_t reveal = env.metadata.at("reveal_decision").get<std::size_t>();
    ps_reveals += a.decision_counts.at(reveal);
    ps.push_back(a.regret);
    opt.push_back(b.regret);
    within_regret += b.regret <= regret_bound;
    within_est += b.divergence_total <= freedman_bound;
    within_realized += b.realized_disagreement <= 2.0 * log_m;
    per_seed.push_back({{"seed", seeds[i]},
                        {"posterior_sampling_regret", a.regret},
                        {"e2d_opt_regret", b.regret},
                        {"e2d_opt_hellinger_estimation_error", b.divergence_total},
                        {"e2d_opt_realized_disagreement", b.realized_disagreement},
                        {"posterior_sampling_hellinger_estimation_error",
                         a.divergence_total}});
  }
  const double ps_mean = Mean(ps), opt_mean = Mean(opt);
  const double ratio = opt_mean > 0.0 ? ps_mean / opt_mean
                                      : std::numeric_limits<double>::infinity();
  const std::size_t needed = (9 * seeds.size() + 9) / 10;
  const bool ratio_ok = ratio >= fx.ratio_threshold;
  const bool regret_ok = within_regret == seeds.size();
  const bool est_ok = within_est >= needed;
  result.ok = result.ok && ratio_ok && regret_ok && est_ok && ps_reveals == 0;
  result.report = {
      {"schema_version", 1},
      {"preset", "cheating-separation"},
      {"H", fx.horizon},
      {"T", T},
      {"num_models", env.cls->size()},
      {"num_states", env.cls->num_states()},
      {"gamma", CheatingGamma(T, env.cls->size())},
      {"delta", fx.delta},
      {"seeds", seeds},
      {"posterior_sampling_mean_regret", ps_mean},
      {"e2d_opt_mean_regret", opt_mean},
      {"regret_ratio", std::isfinite(ratio) ? nlohmann::json(ratio) : nlohmann::json("inf")},
      {"ratio_threshold", fx.ratio_threshold},
      {"ratio_ok", ratio_ok},
      {"regret_constant", fx.regret_constant},
      {"regret_bound", regret_bound},
      {"e2d_opt_within_regret_bound", within_regret},
      {"estimation_error_bound", freedman_bound},
      {"e2d_opt_within_estimation_bound", within_est},
      {"e2d_opt_realized_disagreement_within_2logM", within_realized},
      {"posterior_sampling_reveal_plays", ps_reveals},
      {"per_seed", per_seed},
      {"ok", result.ok}};
  const std::string path = Join(out_dir, "cheating-separation_comparison.json");
  WriteFileAtomically(path, result.report.dump(2) + "\n");
  result.files.push_back(path);
  return result;
}

HarnessResult LockDecGap(const std::string& out_dir, const PresetOptions& options) {
  const std::uint64_t seed = options.seeds.empty() ? 1 : options.seeds.front();
  std::string csv =
      "H,gamma,dec_value,dec_lower_bound,dec_threshold,odec_certificate,"
      "fixture_bound,gap_factor,probes\n";
  HarnessResult result;
  nlohmann::json rows = nlohmann::json::array();
  const double fixture = LockCertificateFixture();
  for (int H : {3, 4, 5}) {
    for (double scale : {0.5, 1.0, 2.0}) {
      const double gamma = scale * std::ldexp(1.0, H) / 2.0;
      const LockGapRow r = LockGapEntry(H, gamma, 64, seed);
      const double bound = fixture * H / gamma;
      const double factor = r.dec_lower_bound / bound;
      csv += std::to_string(H) + "," + FormatDouble(gamma) + "," +
             FormatDouble(r.dec_value) + "," + FormatDouble(r.dec_lower_bound) +
             "," + FormatDouble(r.dec_threshold) + "," +
             FormatDouble(r.odec_certificate) + "," + FormatDouble(bound) + "," +
             FormatDouble(factor) + "," + std::to_string(r.probes) + "\n";
      const bool headline = scale == 1.0;
      const bool ok = !headline ||
                      (r.dec_lower_bound >= r.dec_threshold - 2e-3 &&
                       r.odec_certificate <= bound &&
                       factor >= std::ldexp(1.0, H - 2));
      result.ok = result.ok && ok;
      rows.push_back({{"H", H},
                      {"gamma", gamma},
                      {"dec_value", r.dec_value},
                      {"dec_lower_bound", r.dec_lower_bound},
                      {"dec_threshold", r.dec_threshold},
                      {"odec_certificate", r.odec_certificate},
                      {"fixture_bound", bound},
                      {"gap_factor", factor},
                      {"checked", headline},
                      {"ok", ok}});
    }
  }
  const std::string csv_path = Join(out_dir, "lock-dec-gap.csv");
  WriteFileAtomically(csv_path, csv);
  result.files.push_back(csv_path);
  result.report = {{"schema_version", 1},
                   {"preset", "lock-dec-gap"},
                   {"Delta", 1.0},
                   {"certificate_fixture", fixture},
                   {"rows", rows},
                   {"ok", result.ok}};
  const std::string json_path = Join(out_dir, "lock-dec-gap.json");
  WriteFileAtomically(json_path, result.report.dump(2) + "\n");
  result.files.push_back(json_path);
  return result;
}

// Runs one config family over a grid of T values and reports the mean of
// `metric` per T, which must decrease along the grid.
HarnessResult TrendPreset(const std::string& name, const std::string& out_dir,
                          const PresetOptions& options,
                          const std::vector<std::size_t>& grid,
                          const std::function<RunConfig(std::size_t)>& make,
                          const std::function<double(const RunSummary&)>& metric,
                          const std::string& metric_name,
                          std::vector<std::uint64_t> default_seeds) {
  const auto seeds = SeedsOr(options, default_seeds);
  std::vector<std::size_t> Ts = grid;
  if (options.T) Ts = {*options.T};
  std::vector<RunConfig> configs;
  std::vector<std::string> stems;
  for (std::size_t T : Ts) {
    for (auto seed : seeds) {
      RunConfig c = make(T);
      c.seed = seed;
      configs.push_back(c);
      stems.push_back(name + "_T" + std::to_string(T) + "_seed" + std::to_string(seed));
    }
  }
  HarnessResult result;
  const auto runs = RunAll(configs, stems, out_dir, options.jobs, true);
  Collect(result, runs);
  nlohmann::json trend = nlohmann::json::array();
  std::vector<double> means;
  for (std::size_t i = 0; i < Ts.size(); ++i) {
    std::vector<double> v;
    for (std::size_t j = 0; j < seeds.size(); ++j) v.push_back(metric(runs[i * seeds.size() + j]));
    means.push_back(Mean(v));
    trend.push_back({{"T", Ts[i]}, {"n", configs[i * seeds.size()].n},
                     {metric_name, means.back()}});
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < means.size(); ++i) decreasing = decreasing && means[i] < means[i - 1];
  result.ok = result.ok && decreasing;
  result.report = {{"schema_version", 1},
                   {"preset", name},
                   {"seeds", seeds},
                   {"trend", trend},
                   {"decreasing", decreasing},
                   {"ok", result.ok}};
  const std::string path = Join(out_dir, name + "_trend.json");
  WriteFileAtomically(path, result.report.dump(2) + "\n");
  result.files.push_back(path);
  return result;
}

HarnessResult SingleConfigPreset(const std::string& name, const std::string& out_dir,
                                 const PresetOptions& options, RunConfig base,
                                 std::vector<std::uint64_t> default_seeds) {
  const auto seeds = SeedsOr(options, default_seeds);
  if (options.T) base.T = *options.T;
  std::vector<RunConfig> configs;
  std::vector<std::string> stems;
  for (auto seed : seeds) {
    RunConfig c = base;
    c.seed = seed;
    configs.push_back(c);
    stems.push_back(name + "_seed" + std::to_string(seed));
  }
  HarnessResult result;
  Collect(result, RunAll(configs, stems, out_dir, options.jobs, true));
  nlohmann::json regrets = nlohmann::json::array();
  for (const auto& r : result.runs) regrets.push_back(r.regret);
  result.report = {{"schema_version", 1}, {"preset", name}, {"seeds", seeds},
                   {"regret", regrets}, {"ok", result.ok}};
  return result;
}

RunConfig LockBilinearConfig(std::size_t T) {
  RunConfig c;
  c.name = "lock-bilinear";
  c.rule = Rule::kE2dOptBatched;
  c.T = T;
  c.n = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(T))));
  c.gamma = std::pow(static_cast<double>(T), 0.25);
  c.divergence = "bilinear";
  c.estimator.key = "ew-opt-bilinear";
  c.estimator.eta = 1.0;
  c.environment = "lock(3,1)";
  return c;
}

RunConfig CompleteTwoTimescaleConfig(std::size_t T) {
  RunConfig c;
  c.name = "complete-two-timescale";
  c.rule = Rule::kE2dOptBatched;
  c.T = T;
  c.n = 3;
  c.gamma = 4.0;
  c.divergence = "sbe";
  c.estimator.key = "two-timescale";
  c.estimator.eta = 1.0;
  c.environment = "complete(chain2)";
  return c;
}

RunConfig BanditOptSqConfig() {
  RunConfig c;
  c.name = "bandit-opt-sq";
  c.rule = Rule::kE2dOpt;
  c.T = 500;
  c.gamma = 10.0;
  c.divergence = "sq";
  c.estimator.key = "ew-opt-sq";
  c.environment = "bandit(bernoulli3)";
  return c;
}

RunConfig ChainE2dConfig() {
  RunConfig c;
  c.name = "chain-e2d";
  c.rule = Rule::kE2d;
  c.T = 200;
  c.gamma = 2.0;
  c.divergence = "hellinger";
  c.estimator.key = "ew-indicator";
  c.environment = "complete(chain2)";
  return c;
}

}  // namespace

std::string FormatDouble(double x) {
  if (x == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string RowsToCsv(const ExperimentRecord& record) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : record.rows) {
    AppendUnsigned(out, r.t);
    out += ',';
    AppendUnsigned(out, r.epoch);
    out += ',';
    out += r.decision;
    out += ',';
    for (double v : {r.reward, r.cum_regret, r.inst_regret, r.est_div, r.est_gap,
                     r.solver_gap}) {
      out += FormatDouble(v);
      out += ',';
    }
    AppendUnsigned(out, r.solver_iters);
    out += '\n';
  }
  return out;
}

void RunParallel(const std::vector<std::function<void()>>& tasks,
                 std::size_t jobs) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(jobs, tasks.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto work = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      {
        std::lock_guard<std::mutex> lock(mu);
        if (failure) return;
      }
      try {
        tasks[i]();
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
}

std::size_t SeededTrueModel(std::uint64_t seed, std::size_t class_size) {
  Rng rng = Rng(seed).Split(0x74727565ULL);
  return static_cast<std::size_t>(rng() % class_size);
}

RunSummary WriteRun(const ExperimentRecord& record, const std::string& out_dir,
                    const std::string& stem) {
  fs::create_directories(out_dir);
  RunSummary s;
  s.stem = stem;
  s.rule = RuleKey(record.config.rule);
  s.seed = record.config.seed;
  s.T = record.config.T;
  s.n = record.config.n;
  s.gamma = record.config.gamma;
  s.regret = record.regret;
  s.decomposition_bound = record.decomposition_bound;
  s.decomposition_holds = record.decomposition_holds;
  s.chain_violations = record.chain_violations;
  s.decision_counts = record.decision_counts;
  s.divergence_total = record.divergence_total;
  s.gap_total = record.gap_total;
  s.ledger_total = record.ledger_total;
  s.realized_disagreement = record.realized_disagreement;
  s.num_models = record.environment_metadata.value("num_models", std::size_t{0});
  s.csv_path = Join(out_dir, stem + ".csv");
  WriteFileAtomically(s.csv_path, RowsToCsv(record));
  WriteFileAtomically(Join(out_dir, stem + ".json"), record.Summary().dump(2) + "\n");
  return s;
}

std::vector<std::string> PresetNames() {
  return {"cheating-separation", "lock-dec-gap", "lock-bilinear",
          "complete-two-timescale", "bandit-opt-sq", "chain-e2d"};
}

HarnessResult RunPreset(const std::string& name, const std::string& out_dir,
                        const PresetOptions& options) {
  fs::create_directories(out_dir);
  if (name == "cheating-separation") return CheatingSeparation(out_dir, options);
  if (name == "lock-dec-gap") return LockDecGap(out_dir, options);
  if (name == "lock-bilinear") {
    return TrendPreset(
        name, out_dir, options, {400, 1600, 6400}, LockBilinearConfig,
        [](const RunSummary& r) { return r.regret / static_cast<double>(r.T); },
        "regret_per_round", Range(1, 3));
  }
  if (name == "complete-two-timescale") {
    return TrendPreset(
        name, out_dir, options, {150, 300, 600}, CompleteTwoTimescaleConfig,
        [](const RunSummary& r) {
          return r.ledger_total / static_cast<double>(r.T / r.n);
        },
        "est_opt_per_epoch", Range(1, 3));
  }
  if (name == "bandit-opt-sq") {
    return SingleConfigPreset(name, out_dir, options, BanditOptSqConfig(), Range(1, 5));
  }
  if (name == "chain-e2d") {
    return SingleConfigPreset(name, out_dir, options, ChainE2dConfig(), Range(1, 5));
  }
  std::string list;
  for (const auto& p : PresetNames()) list += (list.empty() ? "" : ", ") + p;
  throw ConfigError("unknown preset '" + name + "' (known: " + list + ")");
}

HarnessResult RunConfigDocument(const ConfigDocument& doc,
                                const std::string& out_dir,
                                std::vector<std::uint64_t> seeds,
                                std::size_t jobs) {
  if (seeds.empty()) seeds = doc.seeds;
  if (doc.preset) {
    PresetOptions o;
    o.T = doc.preset_T;
    o.seeds = seeds;
    o.jobs = jobs;
    return RunPreset(*doc.preset, out_dir, o);
  }
  if (seeds.empty()) seeds = {doc.run.seed};
  std::vector<RunConfig> configs;
  std::vector<std::string> stems;
  for (auto seed : seeds) {
    RunConfig c = doc.run;
    c.seed = seed;
    configs.push_back(c);
    stems.push_back(doc.run.name + "_seed" + std::to_string(seed));
  }
  HarnessResult result;
  Collect(result, RunAll(configs, stems, out_dir, jobs, doc.random_true_model));
  nlohmann::json regrets = nlohmann::json::array();
  for (const auto& r : result.runs) regrets.push_back(r.regret);
  result.report = {{"schema_version", 1}, {"name", doc.run.name},
                   {"seeds", seeds}, {"regret", regrets}, {"ok", result.ok}};
  return result;
}

HarnessResult RunConfigFile(const std::string& path, const std::string& out_dir,
                            const std::vector<std::uint64_t>& seeds,
                            std::size_t jobs) {
  return RunConfigDocument(LoadConfig(path), out_dir, seeds, jobs);
}

CheatingFixture DefaultCheatingFixture() {
  CheatingFixture fx;
  fx.regret_constant = 0.05;
  return fx;
}

double CheatingGamma(std::size_t T, std::size_t num_models) {
  return std::sqrt(static_cast<double>(T) / std::log(static_cast<double>(num_models)));
}

LockGapRow LockGapEntry(int horizon, double gamma, std::size_t dirichlet_probes,
                        std::uint64_t seed) {
  const Environment env = MakeLockFamily(horizon, 1.0, 0);
  const StatisticSpace stats = env.Statistics(StatisticMode::kQFunction);
  const DecInstance instance(*env.cls, stats, Divergence::Bilinear());
  const std::size_t n = stats.size();
  const std::size_t zero_q = n - 1;

  LockGapRow row;
  row.horizon = horizon;
  row.gamma = gamma;
  RandomizedEstimate bar(n, 0.0);
  bar[zero_q] = 1.0;
  const SaddleResult plain = SolveDec(instance, bar, gamma, DecMode::kPlain);
  row.dec_value = plain.value;
  row.dec_lower_bound = plain.lower_bound;
  row.dec_threshold = 0.5 - gamma / std::ldexp(1.0, horizon);

  double sup = -std::numeric_limits<double>::infinity();
  RandomizedEstimate best;
  auto probe = [&](const RandomizedEstimate& mu) {
    const PayoffMatrix game = instance.Payoff(mu, gamma, DecMode::kOptimistic);
    const double v =
        MaxRow(game, PosteriorPushforward(stats, mu, env.cls->decisions().size()));
    ++row.probes;
    if (v > sup) {
      sup = v;
      best = mu;
      return true;
    }
    return false;
  };
  for (std::size_t s = 0; s < n; ++s) {
    RandomizedEstimate mu(n, 0.0);
    mu[s] = 1.0;
    probe(mu);
  }
  probe(RandomizedEstimate(n, 1.0 / static_cast<double>(n)));
  std::vector<double> weights = {0.75, 0.9};
  for (double w = 0.5; w > 1e-4; w /= 2.0) weights.push_back(w);
  for (double k : {0.25, 0.5, 1.0}) weights.push_back(std::min(1.0, k / gamma));
  for (std::size_t s = 0; s + 1 < n; ++s) {
    for (double w : weights) {
      RandomizedEstimate mu(n, 0.0);
      mu[s] = w;
      mu[zero_q] = 1.0 - w;
      probe(mu);
    }
  }
  Rng rng = Rng(seed).Split(static_cast<std::uint64_t>(horizon));
  for (std::size_t k = 0; k < dirichlet_probes; ++k) probe(rng.Dirichlet(n, 0.5));
  // Local ascent from the best probe: move mass between random pairs.
  for (double step = 0.1; step > 1e-4; step /= 2.0) {
    for (int k = 0; k < 1000; ++k) {
      const std::size_t from = rng() % n, to = rng() % n;
      const double moved = std::min(step, best[from]);
      if (from == to || moved <= 0.0) continue;
      RandomizedEstimate mu = best;
      mu[from] -= moved;
      mu[to] += moved;
      probe(mu);
    }
  }
  row.odec_certificate = sup;
  row.fixture = sup * gamma / horizon;
  return row;
}

double LockCertificateFixture() { return 0.125; }

}  // namespace decbench
