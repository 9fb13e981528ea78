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
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "decbench/decbench.h"

namespace fs = std::filesystem;

namespace {

constexpr const char* kTwoArms = R"({
  "type": "bandit",
  "decisions": ["a", "b"],
  "models": [
    {"label": "m0", "arms": [{"support": [0.3], "probs": [1.0]}, {"support": [0.7], "probs": [1.0]}]}
  ],
  "true_model": 0
})";

}  // namespace

TEST_CASE("status strings and errors") {
  CHECK(std::string(decbench_version()).size() > 0);
  CHECK(std::string(decbench_status_string(DECBENCH_CONFIG)) == "config error");
  decbench_class* cls = nullptr;
  CHECK(decbench_class_from_json(nullptr, &cls) == DECBENCH_INVALID_ARGUMENT);
  CHECK(decbench_class_from_json("{not json", &cls) == DECBENCH_DOMAIN);
  CHECK(cls == nullptr);
  CHECK(std::string(decbench_last_error()).size() > 0);
  CHECK(decbench_make_environment("maze(2)", 0, &cls) == DECBENCH_DOMAIN);
  CHECK(decbench_make_environment("lock(3,2)", 0, &cls) == DECBENCH_DOMAIN);
}

TEST_CASE("class handles") {
  decbench_class* cls = nullptr;
  REQUIRE(decbench_class_from_json(kTwoArms, &cls) == DECBENCH_OK);
  size_t models = 0, decisions = 0, qs = 7;
  CHECK(decbench_class_dims(cls, &models, &decisions, &qs) == DECBENCH_OK);
  CHECK(models == 1);
  CHECK(decisions == 2);
  CHECK(qs == 0);

  double mu[1] = {1.0}, value = -1.0, gap = -1.0, p[2] = {0, 0};
  CHECK(decbench_solve_dec(cls, "sq", 1, 2.0, mu, 1, 0.0, &value, &gap, p, 2) == DECBENCH_OK);
  CHECK(std::abs(value) <= 1e-12);
  CHECK(p[1] == doctest::Approx(1.0));
  CHECK(decbench_solve_dec(cls, "sq", 1, 0.0, mu, 1, 0.0, &value, &gap, p, 2) == DECBENCH_DOMAIN);
  CHECK(decbench_solve_dec(cls, "sq", 1, 1.0, mu, 1, 0.0, &value, &gap, p, 3) == DECBENCH_DOMAIN);
  CHECK(decbench_solve_dec(cls, "bilinear", 0, 1.0, mu, 1, 0.0, &value, &gap, p, 2) ==
        DECBENCH_UNSUPPORTED);

  char* json = nullptr;
  REQUIRE(decbench_class_to_json(cls, &json) == DECBENCH_OK);
  decbench_class* back = nullptr;
  CHECK(decbench_class_from_json(json, &back) == DECBENCH_OK);
  decbench_string_free(json);
  decbench_class_free(back);
  decbench_class_free(cls);

  REQUIRE(decbench_make_environment("lock(3,1)", 2, &cls) == DECBENCH_OK);
  CHECK(decbench_class_dims(cls, &models, &decisions, &qs) == DECBENCH_OK);
  CHECK(models == 8);
  CHECK(qs == 9);
  std::vector<double> q_mu(qs, 0.0), q_p(decisions, 0.0);
  q_mu.back() = 1.0;
  CHECK(decbench_solve_dec(cls, "bilinear", 0, 4.0, q_mu.data(), qs, 1e-9, &value, &gap, q_p.data(),
                           q_p.size()) == DECBENCH_OK);
  CHECK(value > 0.0);
  decbench_class_free(cls);
}

TEST_CASE("runs and reports") {
  const fs::path dir = fs::temp_directory_path() / "decbench-capi-test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path config = dir / "run.toml";
  {
    std::ofstream out(config);
    out << "[experiment]\nname = capi\nrule = e2d-opt\nT = 30\ngamma = 10\n"
        << "[divergence]\nkey = sq\n[estimator]\nkey = ew-opt-sq\n"
        << "[environment]\nkey = bandit(bernoulli3)\n";
  }
  decbench_report* report = nullptr;
  const uint64_t seeds[2] = {4, 8};
  REQUIRE(decbench_run_config(config.c_str(), dir.c_str(), seeds, 2, 2, &report) == DECBENCH_OK);
  CHECK(decbench_report_passed(report) == 1);
  CHECK(decbench_report_size(report) == 3);
  const char* name = nullptr;
  const char* detail = nullptr;
  int passed = 0;
  CHECK(decbench_report_line(report, 0, &name, &passed, &detail) == DECBENCH_OK);
  CHECK(std::string(name) == "capi_seed4");
  CHECK(passed == 1);
  CHECK(decbench_report_line(report, 9, &name, &passed, &detail) == DECBENCH_INVALID_ARGUMENT);
  CHECK(std::string(decbench_report_json(report)).find("capi_seed8.csv") != std::string::npos);
  decbench_report_free(report);
  CHECK(fs::exists(dir / "capi_seed4.csv"));

  {
    std::ofstream out(config, std::ios::app);
    out << "colour = blue\n";
  }
  report = nullptr;
  CHECK(decbench_run_config(config.c_str(), dir.c_str(), nullptr, 0, 1, &report) == DECBENCH_CONFIG);
  CHECK(std::string(decbench_last_error()).find("environment.colour") != std::string::npos);
  CHECK(report == nullptr);
  CHECK(decbench_run_config((dir / "missing.toml").c_str(), dir.c_str(), nullptr, 0, 1, &report) !=
        DECBENCH_OK);

  CHECK(decbench_run_preset("no-such-preset", dir.c_str(), nullptr, 0, 1, &report) == DECBENCH_CONFIG);
  const uint64_t one = 1;
  REQUIRE(decbench_run_preset("chain-e2d", dir.c_str(), &one, 1, 1, &report) == DECBENCH_OK);
  CHECK(decbench_report_passed(report) == 1);
  decbench_report_free(report);
  fs::remove_all(dir);
}

TEST_CASE("verify through the C API") {
  decbench_report* report = nullptr;
  REQUIRE(decbench_verify("exp-weights", &report) == DECBENCH_OK);
  CHECK(decbench_report_size(report) == 5);
  CHECK(decbench_report_passed(report) == 1);
  decbench_report_free(report);
  CHECK(decbench_verify("no-such-suite", &report) != DECBENCH_OK);
}
