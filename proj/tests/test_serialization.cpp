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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "decbench/environments.hpp"
#include "decbench/errors.hpp"
#include "decbench/serialization.hpp"

using namespace decbench;
namespace fs = std::filesystem;

namespace {

void CheckSameClass(const ModelClass& a, const ModelClass& b) {
  REQUIRE(a.size() == b.size());
  REQUIRE(a.decisions().size() == b.decisions().size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(SameModel(a.model(i), b.model(i)));
    if (a.is_mdp()) CHECK(std::get<TabularMdp>(a.model(i)) == std::get<TabularMdp>(b.model(i)));
  }
  for (std::size_t d = 0; d < a.decisions().size(); ++d) {
    CHECK(a.decisions()[d].label == b.decisions()[d].label);
    CHECK(a.decisions()[d].arm == b.decisions()[d].arm);
    CHECK(a.decisions()[d].policy == b.decisions()[d].policy);
  }
}

ClassDocument RoundTrip(const ClassDocument& doc) {
  return ClassDocumentFromJson(nlohmann::json::parse(ToJson(doc).dump()));
}

}  // namespace

TEST_CASE("round trip is bit exact") {
  SUBCASE("bandit") {
    BanditModel odd{{FiniteDistribution{{0.1, 1.0 / 3.0}, {0.7, 0.3}},
                     FiniteDistribution::PointMass(0.123456789012345678)}};
    BanditModel other{{FiniteDistribution::PointMass(0.2), FiniteDistribution::PointMass(0.9)}};
    const auto env = MakeBanditClass({odd, other}, {"left", "right"}, 1);
    const ClassDocument doc{env.cls, std::nullopt, env.true_model};
    const ClassDocument back = RoundTrip(doc);
    CheckSameClass(*env.cls, *back.cls);
    CHECK(back.true_model == 1);
    CHECK(!back.q_functions);
    const auto& arm = std::get<BanditModel>(back.cls->model(0)).arms[0];
    CHECK(arm.support[1] == 1.0 / 3.0);
  }
  SUBCASE("mdp with a Q class") {
    for (const char* key : {"lock(3,0.7)", "ps-hard(4)", "complete(chain2-noisy)"}) {
      const auto env = MakeEnvironment(key, 1);
      const ClassDocument doc{env.cls, env.q_class, env.true_model};
      const ClassDocument back = RoundTrip(doc);
      CheckSameClass(*env.cls, *back.cls);
      REQUIRE(back.q_functions.has_value() == env.q_class.has_value());
      if (env.q_class) CHECK(*back.q_functions == *env.q_class);
      CHECK(ToJson(back).dump() == ToJson(doc).dump());
    }
  }
}

TEST_CASE("malformed documents are domain errors") {
  using nlohmann::json;
  CHECK_THROWS_AS(ClassDocumentFromJson(json::object()), DomainError);
  CHECK_THROWS_AS(ClassDocumentFromJson(json{{"type", "pomdp"}, {"models", json::array()}}),
                  DomainError);
  const auto env = MakeEnvironment("lock(2,1)");
  json j = ToJson(*env.cls);
  j["models"][0]["rewards"] = "oops";
  CHECK_THROWS_AS(ClassDocumentFromJson(j), DomainError);
  json k = ToJson(*env.cls);
  k["true_model"] = 99;
  CHECK_THROWS_AS(ClassDocumentFromJson(k), DomainError);
  CHECK_THROWS_AS(LoadClassDocument("/nonexistent/class.json"), DomainError);
}

TEST_CASE("files are written atomically and reload") {
  const fs::path dir = fs::temp_directory_path() / "decbench-serialization-test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto env = MakeEnvironment("complete(chain2)", 2);
  const std::string path = (dir / "class.json").string();
  SaveClassDocument({env.cls, env.q_class, env.true_model}, path);
  const ClassDocument back = LoadClassDocument(path);
  CheckSameClass(*env.cls, *back.cls);
  CHECK(back.true_model == 2);
  for (const auto& entry : fs::directory_iterator(dir)) {
    CHECK(entry.path().filename() == "class.json");
  }
  WriteFileAtomically(path, "replaced");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "replaced");
  fs::remove_all(dir);
}
