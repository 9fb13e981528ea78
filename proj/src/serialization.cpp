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

#include "decbench/serialization.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include "decbench/errors.hpp"

namespace decbench {
namespace {

using nlohmann::json;

const json& Field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw DomainError(std::string("class document: missing field '") + key +
                      "'");
  }
  return j.at(key);
}

std::vector<double> Flatten(const json& j, const std::vector<int>& shape,
                            const char* what) {
  std::vector<double> out;
  std::function<void(const json&, std::size_t)> walk =
      [&](const json& node, std::size_t depth) {
        if (depth == shape.size()) {
          if (!node.is_number()) {
            throw DomainError(std::string(what) + ": expected a number");
          }
          out.push_back(node.get<double>());
          return;
        }
        if (!node.is_array() ||
            node.size() != static_cast<std::size_t>(shape[depth])) {
          throw DomainError(std::string(what) + ": wrong nesting or length");
        }
        for (const auto& child : node) walk(child, depth + 1);
      };
  walk(j, 0);
  return out;
}

json Nest(const std::vector<double>& flat, const std::vector<int>& shape) {
  std::size_t pos = 0;
  std::function<json(std::size_t)> build = [&](std::size_t depth) -> json {
    if (depth == shape.size()) return flat[pos++];
    json arr = json::array();
    for (int i = 0; i < shape[depth]; ++i) arr.push_back(build(depth + 1));
    return arr;
  };
  return build(0);
}

json PolicyToJson(const PolicyTable& p) {
  json layers = json::array();
  for (int h = 0; h < p.horizon(); ++h) {
    json row = json::array();
    for (int s = 0; s < p.num_states(); ++s) row.push_back(p.Action(h, s));
    layers.push_back(row);
  }
  return layers;
}

PolicyTable PolicyFromJson(const json& j, int horizon, int num_states) {
  std::vector<double> flat = Flatten(j, {horizon, num_states}, "policy");
  std::vector<int> actions;
  for (double a : flat) {
    if (a != static_cast<int>(a)) throw DomainError("policy: non-integer");
    actions.push_back(static_cast<int>(a));
  }
  return PolicyTable(horizon, num_states, std::move(actions));
}

}  // namespace

json ToJson(const QFunction& q) {
  return Nest(q.values(), {q.horizon(), q.num_states(), q.num_actions()});
}

QFunction QFunctionFromJson(const json& j, int horizon, int num_states,
                            int num_actions) {
  return QFunction(horizon, num_states, num_actions,
                   Flatten(j, {horizon, num_states, num_actions}, "q"));
}

json ToJson(const ModelClass& cls) {
  json j;
  json models = json::array();
  if (!cls.is_mdp()) {
    j["type"] = "bandit";
    json labels = json::array();
    for (const auto& d : cls.decisions().decisions()) labels.push_back(d.label);
    j["decisions"] = labels;
    for (std::size_t i = 0; i < cls.size(); ++i) {
      json arms = json::array();
      for (const auto& law : std::get<BanditModel>(cls.model(i)).arms) {
        arms.push_back({{"support", law.support}, {"probs", law.probs}});
      }
      models.push_back({{"label", cls.model_label(i)}, {"arms", arms}});
    }
    j["models"] = models;
    return j;
  }
  const int H = cls.horizon(), S = cls.num_states(), A = cls.num_actions();
  j["type"] = "mdp";
  j["horizon"] = H;
  j["num_states"] = S;
  j["num_actions"] = A;
  j["initial"] = cls.initial();
  json decisions = json::array();
  for (const auto& d : cls.decisions().decisions()) {
    decisions.push_back({{"label", d.label}, {"policy", PolicyToJson(*d.policy)}});
  }
  j["decisions"] = decisions;
  for (std::size_t i = 0; i < cls.size(); ++i) {
    const auto& mdp = std::get<TabularMdp>(cls.model(i));
    models.push_back({{"label", cls.model_label(i)},
                      {"transitions", Nest(mdp.transitions(), {H, S, A, S})},
                      {"rewards", Nest(mdp.rewards(), {H, S, A})}});
  }
  j["models"] = models;
  return j;
}

json ToJson(const ClassDocument& doc) {
  json j = ToJson(*doc.cls);
  if (doc.q_functions) {
    json qs = json::array();
    for (const auto& q : *doc.q_functions) qs.push_back(ToJson(q));
    j["q_functions"] = qs;
  }
  if (doc.true_model) j["true_model"] = *doc.true_model;
  return j;
}

ClassDocument ClassDocumentFromJson(const json& j) {
  const std::string type = Field(j, "type").get<std::string>();
  const json& models_j = Field(j, "models");
  if (!models_j.is_array()) throw DomainError("class document: bad models");
  std::vector<Model> models;
  std::vector<std::string> labels;
  ClassDocument doc;
  auto label_of = [&](const json& m) {
    return m.contains("label") ? m.at("label").get<std::string>()
                               : "M" + std::to_string(labels.size());
  };
  if (type == "bandit") {
    std::vector<std::string> names;
    for (const auto& d : Field(j, "decisions")) names.push_back(d.get<std::string>());
    for (const auto& m : models_j) {
      BanditModel b;
      for (const auto& arm : Field(m, "arms")) {
        b.arms.push_back({Field(arm, "support").get<std::vector<double>>(),
                          Field(arm, "probs").get<std::vector<double>>()});
      }
      labels.push_back(label_of(m));
      models.push_back(std::move(b));
    }
    doc.cls = std::make_shared<ModelClass>(DecisionSpace::Arms(names),
                                           std::move(models), labels);
  } else if (type == "mdp") {
    const int H = Field(j, "horizon").get<int>();
    const int S = Field(j, "num_states").get<int>();
    const int A = Field(j, "num_actions").get<int>();
    std::vector<double> initial = Flatten(Field(j, "initial"), {S}, "initial");
    std::vector<Decision> decisions;
    for (const auto& d : Field(j, "decisions")) {
      decisions.push_back({Field(d, "label").get<std::string>(), -1,
                           PolicyFromJson(Field(d, "policy"), H, S)});
    }
    for (const auto& m : models_j) {
      labels.push_back(label_of(m));
      models.emplace_back(TabularMdp(
          H, S, A, initial,
          Flatten(Field(m, "transitions"), {H, S, A, S}, "transitions"),
          Flatten(Field(m, "rewards"), {H, S, A}, "rewards")));
    }
    doc.cls = std::make_shared<ModelClass>(
        DecisionSpace(std::move(decisions)), std::move(models), labels);
    if (j.contains("q_functions")) {
      std::vector<QFunction> qs;
      for (const auto& q : j.at("q_functions")) {
        qs.push_back(QFunctionFromJson(q, H, S, A));
      }
      doc.q_functions = std::move(qs);
    }
  } else {
    throw DomainError("class document: unknown type '" + type + "'");
  }
  if (j.contains("true_model")) {
    const auto idx = j.at("true_model").get<std::size_t>();
    if (idx >= doc.cls->size()) {
      throw DomainError("class document: true_model out of range");
    }
    doc.true_model = idx;
  }
  return doc;
}

ClassDocument LoadClassDocument(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open class document '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw DomainError("class document '" + path + "': " + e.what());
  }
  return ClassDocumentFromJson(j);
}

void SaveClassDocument(const ClassDocument& doc, const std::string& path) {
  WriteFileAtomically(path, ToJson(doc).dump(1) + "\n");
}

void WriteFileAtomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ostringstream suffix;
  suffix << ".tmp-" << std::this_thread::get_id();
  const fs::path tmp = target.string() + suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace decbench
