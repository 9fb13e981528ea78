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

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"

#include "decbench/config.hpp"
#include "decbench/errors.hpp"
#include "decbench/harness.hpp"

using namespace decbench;
namespace fs = std::filesystem;

namespace {

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path Scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("decbench-harness-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

constexpr const char* kBanditConfig = R"(# small bandit run
[experiment]
name = demo
rule = e2d-opt
T = 60
gamma = 10
seeds = 3,5

[solver]
tol = 1e-8

[divergence]
key = sq

[estimator]
key = ew-opt-sq
eta = 0.5

[environment]
key = bandit(bernoulli3)
true_model = 2
)";

}  // namespace

TEST_CASE("number formatting") {
  CHECK(FormatDouble(0.0) == "0");
  CHECK(FormatDouble(-0.0) == "0");
  CHECK(FormatDouble(0.1) == "0.1");
  CHECK(FormatDouble(1.0 / 3.0) == "0.3333333333333333");
  CHECK(std::stod(FormatDouble(2.0 / 7.0)) == 2.0 / 7.0);
}

TEST_CASE("config parsing") {
  const ConfigDocument doc = ParseConfig(kBanditConfig);
  CHECK(doc.run.name == "demo");
  CHECK(doc.run.T == 60);
  CHECK(doc.run.rule == Rule::kE2dOpt);
  CHECK(doc.run.gamma == 10.0);
  CHECK(doc.run.divergence == "sq");
  CHECK(doc.run.estimator.eta == 0.5);
  CHECK(doc.run.environment == "bandit(bernoulli3)");
  CHECK(doc.run.true_model == 2);
  CHECK(doc.seeds == std::vector<std::uint64_t>{3, 5});
  CHECK(!doc.preset);

  CHECK(ParseSeedList("1, 2,10") == std::vector<std::uint64_t>{1, 2, 10});
  CHECK_THROWS_AS(ParseSeedList("1,x"), ConfigError);

  std::string empty_t = kBanditConfig;
  empty_t.replace(empty_t.find("T = 60"), 6, "T =");
  CHECK_THROWS_WITH_AS(ParseConfig(empty_t), doctest::Contains("experiment.T is empty"), ConfigError);

  std::string unknown = kBanditConfig;
  unknown += "speed = 3\n[plotting]\ncolor = red\n";
  try {
    ParseConfig(unknown);
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("unknown config keys") != std::string::npos);
    CHECK(what.find("environment.speed") != std::string::npos);
    CHECK(what.find("plotting.color") != std::string::npos);
  }

  const ConfigDocument preset = ParseConfig("[experiment]\npreset = chain-e2d\nseeds = 2\n");
  CHECK(preset.preset == "chain-e2d");
  CHECK_THROWS_AS(ParseConfig("[experiment]\npreset = chain-e2d\ngamma = 3\n"), ConfigError);
}

TEST_CASE("config runs write reproducible CSV and JSON") {
  const fs::path a = Scratch("a"), b = Scratch("b");
  const ConfigDocument doc = ParseConfig(kBanditConfig);
  const HarnessResult ra = RunConfigDocument(doc, a.string(), {}, 2);
  const HarnessResult rb = RunConfigDocument(doc, b.string(), {}, 1);
  REQUIRE(ra.runs.size() == 2);
  CHECK(ra.ok);
  for (const char* stem : {"demo_seed3", "demo_seed5"}) {
    const std::string csv = Slurp(a / (std::string(stem) + ".csv"));
    CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 61);
    CHECK(csv == Slurp(b / (std::string(stem) + ".csv")));
    const auto summary = nlohmann::json::parse(Slurp(a / (std::string(stem) + ".json")));
    CHECK(summary.at("schema_version") == 1);
    CHECK(summary.at("config").at("solver").at("tol") == 1e-8);
    CHECK(summary.at("estimator_hyperparameters").at("eta") == 0.5);
    CHECK(summary.at("decomposition").at("holds") == true);
  }
  // Seeds from the caller override the document.
  const HarnessResult rc = RunConfigDocument(doc, a.string(), {9}, 1);
  CHECK(rc.runs.size() == 1);
  CHECK(fs::exists(a / "demo_seed9.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("cheating-separation preset writes both rules and a comparison") {
  const fs::path dir = Scratch("cheat");
  PresetOptions o;
  o.T = 300;
  o.seeds = {1, 2};
  const HarnessResult r = RunPreset("cheating-separation", dir.string(), o);
  CHECK(r.runs.size() == 4);
  CHECK(fs::exists(dir / "cheating-separation_seed1_posterior-sampling.csv"));
  CHECK(fs::exists(dir / "cheating-separation_seed1_e2d-opt.csv"));
  const auto cmp = nlohmann::json::parse(Slurp(dir / "cheating-separation_comparison.json"));
  CHECK(cmp.contains("regret_ratio"));
  CHECK(cmp.at("posterior_sampling_reveal_plays") == 0);
  const double ps = cmp.at("posterior_sampling_mean_regret");
  const double opt = cmp.at("e2d_opt_mean_regret");
  CHECK(cmp.at("regret_ratio").get<double>() == doctest::Approx(ps / opt));
  fs::remove_all(dir);
}

TEST_CASE("lock-dec-gap preset writes a table") {
  const fs::path dir = Scratch("lock");
  const HarnessResult r = RunPreset("lock-dec-gap", dir.string());
  const std::string csv = Slurp(dir / "lock-dec-gap.csv");
  CHECK(csv.rfind("H,gamma,dec_value,dec_lower_bound", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
  CHECK(r.report.at("rows").size() == 9);
  CHECK(r.ok);
  fs::remove_all(dir);
}

TEST_CASE("unknown presets are config errors") {
  CHECK_THROWS_AS(RunPreset("nope", Scratch("nope").string()), ConfigError);
}

TEST_CASE("parallel runner") {
  std::atomic<int> count{0};
  std::vector<std::function<void()>> tasks(20, [&] { ++count; });
  RunParallel(tasks, 4);
  CHECK(count == 20);
  tasks.push_back([] { throw std::runtime_error("boom"); });
  CHECK_THROWS_WITH(RunParallel(tasks, 3), "boom");
}
