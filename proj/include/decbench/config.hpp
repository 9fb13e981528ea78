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

#ifndef DECBENCH_CONFIG_HPP_
#define DECBENCH_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "decbench/decision_rules.hpp"

namespace decbench {

// A parsed config document. Either a named preset (with optional T and
// seed overrides) or a single fully specified run.
struct ConfigDocument {
  std::optional<std::string> preset;
  std::optional<std::size_t> preset_T;
  RunConfig run;
  bool random_true_model = false;
  std::vector<std::uint64_t> seeds;  // empty: the run's own seed
};

// Sections [experiment], [solver], [divergence], [estimator], [environment];
// `#` and `;` start comments; values may be double-quoted. Unknown sections or
// keys are rejected with the full list.
ConfigDocument ParseConfig(const std::string& text);
ConfigDocument LoadConfig(const std::string& path);

std::vector<std::uint64_t> ParseSeedList(const std::string& text);

}  // namespace decbench

#endif  // DECBENCH_CONFIG_HPP_
