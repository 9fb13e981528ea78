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

// decbench command line. Talks to the library only through decbench.h.
//
// Exit codes: 0 all checks passed, 1 some check failed, 2 usage or runtime
// error.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "decbench/decbench.h"

namespace {

constexpr int kExitFailed = 1;
constexpr int kExitError = 2;

int PrintReport(decbench_report* report, bool verbose) {
  const size_t n = decbench_report_size(report);
  for (size_t i = 0; i < n; ++i) {
    const char* name = nullptr;
    const char* detail = nullptr;
    int passed = 0;
    decbench_report_line(report, i, &name, &passed, &detail);
    std::printf("%s  %s", passed ? "PASS" : "FAIL", name);
    if (verbose || !passed) std::printf("  (%s)", detail);
    std::printf("\n");
  }
  const int ok = decbench_report_passed(report);
  decbench_report_free(report);
  return ok ? 0 : kExitFailed;
}

int Error(decbench_status status) {
  std::fprintf(stderr, "decbench: %s: %s\n", decbench_status_string(status),
               decbench_last_error());
  return kExitError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decision-estimation benchmark harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", decbench_version());

  std::string config, preset, out_dir, suite = "all";
  std::vector<std::uint64_t> seeds;
  size_t jobs = 1;
  bool verbose = false;

  auto* run = app.add_subcommand("run", "run a config file or a named preset");
  auto* config_opt = run->add_option("--config", config, "config file")->check(CLI::ExistingFile);
  run->add_option("--preset", preset, "preset name")->excludes(config_opt);
  run->add_option("--out", out_dir, "output directory (default: $DECBENCH_OUT)");
  run->add_option("--seeds", seeds, "comma-separated seed list")->delimiter(',');
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  run->add_flag("-v,--verbose", verbose, "print details for passing lines");

  auto* verify = app.add_subcommand("verify", "run acceptance suites");
  verify->add_option("--suite", suite, "suite name or 'all'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }

  decbench_report* report = nullptr;
  decbench_status status = DECBENCH_OK;
  if (*run) {
    if (config.empty() == preset.empty()) {
      std::fprintf(stderr, "decbench: run needs exactly one of --config or --preset\n");
      return kExitError;
    }
    if (out_dir.empty()) {
      const char* env = std::getenv("DECBENCH_OUT");
      if (!env || !*env) {
        std::fprintf(stderr, "decbench: no --out given and DECBENCH_OUT is unset\n");
        return kExitError;
      }
      out_dir = env;
    }
    const std::uint64_t* seed_ptr = seeds.empty() ? nullptr : seeds.data();
    status = config.empty()
                 ? decbench_run_preset(preset.c_str(), out_dir.c_str(), seed_ptr,
                                       seeds.size(), jobs, &report)
                 : decbench_run_config(config.c_str(), out_dir.c_str(), seed_ptr,
                                       seeds.size(), jobs, &report);
  } else {
    status = decbench_verify(suite.c_str(), &report);
    verbose = true;
  }
  if (status != DECBENCH_OK) return Error(status);
  return PrintReport(report, verbose);
}
