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

#ifndef DECBENCH_SERIALIZATION_HPP_
#define DECBENCH_SERIALIZATION_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "decbench/model.hpp"

namespace decbench {

// A model class document:
//   {"type": "bandit" | "mdp", "decisions": [...], "models": [...],
//    optional "q_functions": [...], optional "true_model": index}
struct ClassDocument {
  std::shared_ptr<const ModelClass> cls;
  std::optional<std::vector<QFunction>> q_functions;
  std::optional<std::size_t> true_model;
};

nlohmann::json ToJson(const ModelClass& cls);
nlohmann::json ToJson(const ClassDocument& doc);
nlohmann::json ToJson(const QFunction& q);

ClassDocument ClassDocumentFromJson(const nlohmann::json& j);
QFunction QFunctionFromJson(const nlohmann::json& j, int horizon,
                            int num_states, int num_actions);

ClassDocument LoadClassDocument(const std::string& path);
void SaveClassDocument(const ClassDocument& doc, const std::string& path);

// Writes via a temporary sibling and rename.
void WriteFileAtomically(const std::string& path, const std::string& content);

}  // namespace decbench

#endif  // DECBENCH_SERIALIZATION_HPP_
