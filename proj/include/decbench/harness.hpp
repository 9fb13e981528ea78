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

#ifndef DECBENCH_HARNESS_HPP_
#define DECBENCH_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "decbench/config.hpp"
#include "decbench/decision_rules.hpp"

namespace decbench {

inline constexpr const char* kCsvHeader =
    "t,epoch,decision,reward,cum_regret,inst_regret,est_div,est_gap,"
    "solver_gap,solver_iters";

// Shortest round-trip decimal form.
std::string FormatDouble(double x);
std::string RowsToCsv(const ExperimentRecord& record);

// Runs tasks on up to `jobs` threads; rethrows the first failure.
void RunParallel(const std::vector<std::function<void()>>& tasks,
                 std::size_t jobs);

struct RunSummary {
  std::string stem;
  std::string rule;
  std::uint64_t seed = 0;
  std::size_t T = 0;
  std::size_t n = 1;
  double gamma = 0.0;
  double regret = 0.0;
  double decomposition_bound = 0.0;
  bool decomposition_holds = false;
  std::size_t chain_violations = 0;
  std::vector<std::size_t> decision_counts;
  double divergence_total = 0.0;
  double gap_total = 0.0;
  double ledger_total = 0.0;
  double realized_disagreement = -1.0;
  std::size_t num_models = 0;
  std::size_t num_states = 0;
  std::string csv_path;
};

struct HarnessResult {
  std::vector<RunSummary> runs;
  std::vector<std::string> files;
  nlohmann::json report = nlohmann::json::object();
  bool ok = true;
};

struct PresetOptions {
  std::optional<std::size_t> T;
  std::vector<std::uint64_t> seeds;  // empty: the preset's default
  std::size_t jobs = 1;
};

std::vector<std::string> PresetNames();
HarnessResult RunPreset(const std::string& name, const std::string& out_dir,
                        const PresetOptions& options = {});

// Executes a config on every seed; writes <name>_seed<k>.csv/.json.
HarnessResult RunConfigDocument(const ConfigDocument& doc,
                                const std::string& out_dir,
                                std::vector<std::uint64_t> seeds,
                                std::size_t jobs);
HarnessResult RunConfigFile(const std::string& path, const std::string& out_dir,
                            const std::vector<std::uint64_t>& seeds,
                            std::size_t jobs);

// Writes <stem>.csv and <stem>.json and summarizes the record.
RunSummary WriteRun(const ExperimentRecord& record, const std::string& out_dir,
                    const std::string& stem);

std::size_t SeededTrueModel(std::uint64_t seed, std::size_t class_size);

// Frozen constants of the separation experiment.
struct CheatingFixture {
  int horizon = 6;
  std::size_t T = 2000;
  double ratio_threshold = 5.0;
  double regret_constant = 0.0;  // C in C sqrt(T log S)
  double delta = 0.05;
};
CheatingFixture DefaultCheatingFixture();
double CheatingGamma(std::size_t T, std::size_t num_models);

// One row of the lock separation table.
struct LockGapRow {
  int horizon = 0;
  double gamma = 0.0;
  double dec_value = 0.0;        // plain dec^bi at the zero Q (solver value)
  double dec_lower_bound = 0.0;  // certified lower bound
  double dec_threshold = 0.0;    // Delta/2 - gamma Delta^2 / 2^H
  double odec_certificate = 0.0; // sup over probed mu of the certificate value
  double fixture = 0.0;          // odec_certificate * gamma / H
  std::size_t probes = 0;
};
LockGapRow LockGapEntry(int horizon, double gamma, std::size_t dirichlet_probes,
                        std::uint64_t seed);
double LockCertificateFixture();

}  // namespace decbench

#endif  // DECBENCH_HARNESS_HPP_
