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

#ifndef DECBENCH_VERIFY_HPP_
#define DECBENCH_VERIFY_HPP_

#include <string>
#include <vector>

namespace decbench {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;  // measured values and margins
};

struct Report {
  std::string suite;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const;
  std::string Format() const;
};

// divergences | dec-oracle | exp-weights | decomposition | cheating |
// lock-gap | bilinear-conc | estimators | determinism | all
std::vector<std::string> SuiteNames();
std::vector<Report> Verify(const std::string& suite);

// Individual suites. `scratch` is a writable directory for run outputs.
Report VerifyDivergences();
Report VerifyDecOracle();
Report VerifyExpWeights();
Report VerifyDecomposition(const std::string& scratch);
Report VerifyCheating(const std::string& scratch);
Report VerifyLockGap(const std::string& scratch);
Report VerifyBilinearConcentration();
Report VerifyEstimators();
Report VerifyDeterminism(const std::string& scratch);

}  // namespace decbench

#endif  // DECBENCH_VERIFY_HPP_
