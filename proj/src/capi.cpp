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

#include "decbench/decbench.h"

#include <cstring>
#include <string>
#include <vector>

#include "decbench/errors.hpp"
#include "decbench/harness.hpp"
#include "decbench/serialization.hpp"
#include "decbench/verify.hpp"

struct decbench_class {
  decbench::Environment env;
};

struct decbench_report {
  struct Line {
    std::string name, detail;
    bool passed;
  };
  std::vector<Line> lines;
  std::string json;
};

namespace {

thread_local std::string last_error;

decbench_status Fail(decbench_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Maps the in-flight exception to a status code.
decbench_status Translate() {
  try {
    throw;
  } catch (const decbench::ConfigError& e) {
    return Fail(DECBENCH_CONFIG, e.what());
  } catch (const decbench::DomainError& e) {
    return Fail(DECBENCH_DOMAIN, e.what());
  } catch (const decbench::UnsupportedError& e) {
    return Fail(DECBENCH_UNSUPPORTED, e.what());
  } catch (const decbench::UnconvergedError& e) {
    return Fail(DECBENCH_UNCONVERGED, e.what());
  } catch (const nlohmann::json::exception& e) {
    return Fail(DECBENCH_DOMAIN, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return Fail(DECBENCH_IO, e.what());
  } catch (const std::ios_base::failure& e) {
    return Fail(DECBENCH_IO, e.what());
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    if (what.find("cannot open") != std::string::npos ||
        what.find("write") != std::string::npos) {
      return Fail(DECBENCH_IO, what);
    }
    return Fail(DECBENCH_INTERNAL, what);
  } catch (const std::exception& e) {
    return Fail(DECBENCH_INTERNAL, e.what());
  } catch (...) {
    return Fail(DECBENCH_INTERNAL, "unknown error");
  }
}

template <typename F>
decbench_status Guard(F&& body) {
  try {
    body();
    last_error.clear();
    return DECBENCH_OK;
  } catch (...) {
    return Translate();
  }
}

decbench_report* FromHarness(const decbench::HarnessResult& r) {
  auto* report = new decbench_report;
  for (const auto& run : r.runs) {
    report->lines.push_back(
        {run.stem, "regret " + decbench::FormatDouble(run.regret) + " <= bound " +
                       decbench::FormatDouble(run.decomposition_bound),
         run.decomposition_holds && run.chain_violations == 0});
  }
  report->lines.push_back({"preset-checks", r.report.dump(), r.ok});
  nlohmann::json j = r.report;
  j["files"] = r.files;
  report->json = j.dump(2);
  return report;
}

std::vector<std::uint64_t> Seeds(const uint64_t* seeds, size_t n) {
  return seeds ? std::vector<std::uint64_t>(seeds, seeds + n) : std::vector<std::uint64_t>{};
}

}  // namespace

extern "C" {

const char* decbench_version(void) { return "1.0.0"; }

const char* decbench_status_string(decbench_status status) {
  switch (status) {
    case DECBENCH_OK: return "ok";
    case DECBENCH_INVALID_ARGUMENT: return "invalid argument";
    case DECBENCH_DOMAIN: return "domain error";
    case DECBENCH_UNSUPPORTED: return "unsupported";
    case DECBENCH_UNCONVERGED: return "solver unconverged";
    case DECBENCH_IO: return "i/o error";
    case DECBENCH_CONFIG: return "config error";
    case DECBENCH_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* decbench_last_error(void) { return last_error.c_str(); }

void decbench_string_free(char* s) { delete[] s; }

decbench_status decbench_class_from_json(const char* json, decbench_class** out) {
  if (!json || !out) return Fail(DECBENCH_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return Guard([&] {
    decbench::ClassDocument doc =
        decbench::ClassDocumentFromJson(nlohmann::json::parse(json));
    decbench::Environment env;
    env.key = "json";
    env.cls = doc.cls;
    env.q_class = doc.q_functions;
    env.true_model = doc.true_model.value_or(0);
    if (env.true_model >= env.cls->size()) {
      throw decbench::DomainError("true_model out of range");
    }
    *out = new decbench_class{std::move(env)};
  });
}

decbench_status decbench_make_environment(const char* key, size_t true_model,
                                          decbench_class** out) {
  if (!key || !out) return Fail(DECBENCH_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return Guard([&] {
    *out = new decbench_class{decbench::MakeEnvironment(key, true_model)};
  });
}

decbench_status decbench_class_to_json(const decbench_class* cls, char** out_json) {
  if (!cls || !out_json) return Fail(DECBENCH_INVALID_ARGUMENT, "null argument");
  *out_json = nullptr;
  return Guard([&] {
    decbench::ClassDocument doc{cls->env.cls, cls->env.q_class, cls->env.true_model};
    const std::string text = decbench::ToJson(doc).dump();
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *out_json = buf;
  });
}

decbench_status decbench_class_dims(const decbench_class* cls, size_t* num_models,
                                    size_t* num_decisions, size_t* num_q_functions) {
  if (!cls) return Fail(DECBENCH_INVALID_ARGUMENT, "null class");
  if (num_models) *num_models = cls->env.cls->size();
  if (num_decisions) *num_decisions = cls->env.cls->decisions().size();
  if (num_q_functions) *num_q_functions = cls->env.q_class ? cls->env.q_class->size() : 0;
  last_error.clear();
  return DECBENCH_OK;
}

void decbench_class_free(decbench_class* cls) { delete cls; }

decbench_status decbench_solve_dec(const decbench_class* cls, const char* divergence,
                                   int optimistic, double gamma, const double* mu,
                                   size_t mu_len, double tol, double* value,
                                   double* gap, double* p_out, size_t p_len) {
  if (!cls || !divergence || !mu) return Fail(DECBENCH_INVALID_ARGUMENT, "null argument");
  return Guard([&] {
    const auto d = decbench::Divergence::FromKey(divergence);
    const auto& env = cls->env;
    const decbench::StatisticSpace stats =
        d.accepts_q_functions() && env.q_class
            ? env.Statistics(decbench::StatisticMode::kQFunction)
            : env.Statistics(decbench::StatisticMode::kModel);
    if (mu_len != stats.size()) {
      throw decbench::DomainError("mu has " + std::to_string(mu_len) + " entries, expected " +
                                  std::to_string(stats.size()));
    }
    if (p_out && p_len != env.cls->decisions().size()) {
      throw decbench::DomainError("p_out must hold one entry per decision");
    }
    decbench::SolverOptions options;
    if (tol > 0.0) options.tol = tol;
    const decbench::DecInstance instance(*env.cls, stats, d);
    const auto r = decbench::SolveDec(
        instance, std::vector<double>(mu, mu + mu_len), gamma,
        optimistic ? decbench::DecMode::kOptimistic : decbench::DecMode::kPlain, options);
    if (!r.converged) throw decbench::UnconvergedError("solve_dec unconverged", r.gap);
    if (value) *value = r.value;
    if (gap) *gap = r.gap;
    if (p_out) std::copy(r.p.begin(), r.p.end(), p_out);
  });
}

decbench_status decbench_run_config(const char* config_path, const char* out_dir,
                                    const uint64_t* seeds, size_t num_seeds, size_t jobs,
                                    decbench_report** out) {
  if (!config_path || !out_dir || !out) return Fail(DECBENCH_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return Guard([&] {
    *out = FromHarness(decbench::RunConfigFile(config_path, out_dir, Seeds(seeds, num_seeds),
                                               jobs == 0 ? 1 : jobs));
  });
}

decbench_status decbench_run_preset(const char* name, const char* out_dir,
                                    const uint64_t* seeds, size_t num_seeds, size_t jobs,
                                    decbench_report** out) {
  if (!name || !out_dir || !out) return Fail(DECBENCH_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return Guard([&] {
    decbench::PresetOptions options;
    options.seeds = Seeds(seeds, num_seeds);
    options.jobs = jobs == 0 ? 1 : jobs;
    *out = FromHarness(decbench::RunPreset(name, out_dir, options));
  });
}

decbench_status decbench_verify(const char* suite, decbench_report** out) {
  if (!suite || !out) return Fail(DECBENCH_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return Guard([&] {
    auto* report = new decbench_report;
    nlohmann::json suites = nlohmann::json::array();
    for (const auto& r : decbench::Verify(suite)) {
      for (const auto& c : r.checks) {
        report->lines.push_back({r.suite + "/" + c.name, c.detail, c.passed});
      }
      suites.push_back({{"suite", r.suite}, {"passed", r.passed()}, {"seconds", r.seconds}});
    }
    report->json = nlohmann::json{{"suites", suites}}.dump(2);
    *out = report;
  });
}

size_t decbench_report_size(const decbench_report* report) {
  return report ? report->lines.size() : 0;
}

decbench_status decbench_report_line(const decbench_report* report, size_t index,
                                     const char** name, int* passed, const char** detail) {
  if (!report) return Fail(DECBENCH_INVALID_ARGUMENT, "null report");
  if (index >= report->lines.size()) return Fail(DECBENCH_INVALID_ARGUMENT, "index out of range");
  const auto& line = report->lines[index];
  if (name) *name = line.name.c_str();
  if (passed) *passed = line.passed ? 1 : 0;
  if (detail) *detail = line.detail.c_str();
  return DECBENCH_OK;
}

int decbench_report_passed(const decbench_report* report) {
  if (!report) return 0;
  for (const auto& l : report->lines) {
    if (!l.passed) return 0;
  }
  return 1;
}

const char* decbench_report_json(const decbench_report* report) {
  return report ? report->json.c_str() : "";
}

void decbench_report_free(decbench_report* report) { delete report; }

}  // extern "C"
