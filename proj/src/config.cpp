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

#include "decbench/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "decbench/errors.hpp"

namespace decbench {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& KnownKeys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"experiment",
       {"name", "preset", "rule", "T", "n", "gamma", "seed", "seeds", "delta"}},
      {"solver", {"tol", "max_iters", "on_unconverged", "method"}},
      {"divergence", {"key"}},
      {"estimator", {"key", "eta", "lambda", "beta", "L"}},
      {"environment", {"key", "true_model"}}};
  return keys;
}

std::string StripComments(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    bool quoted = false;
    std::size_t cut = line.size();
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (!quoted && (line[i] == '#' || line[i] == ';')) {
        cut = i;
        break;
      }
    }
    out += line.substr(0, cut);
    out += '\n';
  }
  return out;
}

std::string Unquote(std::string v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return v.substr(1, v.size() - 2);
  }
  return v;
}

double ToDouble(const std::string& key, const std::string& v) {
  if (v.empty()) throw ConfigError(key + " is empty");
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": '" + v + "' is not a number");
  }
  return out;
}

std::uint64_t ToUnsigned(const std::string& key, const std::string& v) {
  if (v.empty()) throw ConfigError(key + " is empty");
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": '" + v + "' is not a non-negative integer");
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> ParseSeedList(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("empty entry in seed list");
    item = item.substr(b, e - b + 1);
    const auto dash = item.find("..");
    if (dash != std::string::npos) {
      const auto lo = ToUnsigned("seeds", item.substr(0, dash));
      const auto hi = ToUnsigned("seeds", item.substr(dash + 2));
      if (hi < lo) throw ConfigError("seed range " + item + " is empty");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(ToUnsigned("seeds", item));
    }
  }
  if (seeds.empty()) throw ConfigError("seed list is empty");
  return seeds;
}

ConfigDocument ParseConfig(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(StripComments(text));
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  std::vector<std::string> unknown;
  std::map<std::string, std::map<std::string, std::string>> values;
  for (const auto& [section, body] : tree) {
    auto known = KnownKeys().find(section);
    if (body.empty()) {
      unknown.push_back(section + " (top-level key)");
      continue;
    }
    if (known == KnownKeys().end()) {
      for (const auto& entry : body) unknown.push_back(section + "." + entry.first);
      continue;
    }
    for (const auto& [key, value] : body) {
      if (!known->second.count(key)) {
        unknown.push_back(section + "." + key);
      } else {
        values[section][key] = Unquote(value.get_value<std::string>());
      }
    }
  }
  if (!unknown.empty()) {
    std::string list;
    for (const auto& u : unknown) list += (list.empty() ? "" : ", ") + u;
    throw ConfigError("unknown config keys: " + list);
  }

  auto get = [&](const std::string& s, const std::string& k) -> const std::string* {
    auto sec = values.find(s);
    if (sec == values.end()) return nullptr;
    auto it = sec->second.find(k);
    return it == sec->second.end() ? nullptr : &it->second;
  };

  ConfigDocument doc;
  RunConfig& run = doc.run;
  if (auto v = get("experiment", "name")) run.name = *v;
  if (auto v = get("experiment", "seeds")) doc.seeds = ParseSeedList(*v);
  if (auto v = get("experiment", "preset")) {
    doc.preset = *v;
    if (auto t = get("experiment", "T")) doc.preset_T = ToUnsigned("experiment.T", *t);
    for (const auto& [section, body] : values) {
      for (const auto& [key, _] : body) {
        if (section != "experiment" ||
            (key != "name" && key != "preset" && key != "seeds" && key != "T")) {
          throw ConfigError("preset configs only accept experiment.name, "
                            "experiment.T and experiment.seeds; got " +
                            section + "." + key);
        }
      }
    }
    return doc;
  }

  const std::string* T = get("experiment", "T");
  if (!T) throw ConfigError("experiment.T is required");
  run.T = ToUnsigned("experiment.T", *T);
  if (auto v = get("experiment", "rule")) run.rule = ParseRule(*v);
  if (auto v = get("experiment", "n")) run.n = ToUnsigned("experiment.n", *v);
  if (auto v = get("experiment", "gamma")) run.gamma = ToDouble("experiment.gamma", *v);
  if (auto v = get("experiment", "seed")) run.seed = ToUnsigned("experiment.seed", *v);
  if (auto v = get("experiment", "delta")) run.delta = ToDouble("experiment.delta", *v);

  if (auto v = get("solver", "tol")) run.solver.tol = ToDouble("solver.tol", *v);
  if (auto v = get("solver", "max_iters")) {
    run.solver.max_iters = ToUnsigned("solver.max_iters", *v);
  }
  if (auto v = get("solver", "on_unconverged")) {
    if (*v == "abort") {
      run.warn_unconverged = false;
    } else if (*v == "warn") {
      run.warn_unconverged = true;
    } else {
      throw ConfigError("solver.on_unconverged must be abort or warn");
    }
  }
  if (auto v = get("solver", "method")) {
    if (*v == "simplex") {
      run.solver.method = SaddleMethod::kSimplex;
    } else if (*v == "multiplicative-weights") {
      run.solver.method = SaddleMethod::kMultiplicativeWeights;
    } else {
      throw ConfigError("solver.method must be simplex or multiplicative-weights");
    }
  }

  if (auto v = get("divergence", "key")) run.divergence = *v;
  if (auto v = get("estimator", "key")) run.estimator.key = *v;
  if (auto v = get("estimator", "eta")) run.estimator.eta = ToDouble("estimator.eta", *v);
  if (auto v = get("estimator", "lambda")) {
    run.estimator.lambda = ToDouble("estimator.lambda", *v);
  }
  if (auto v = get("estimator", "beta")) run.estimator.beta = ToDouble("estimator.beta", *v);
  if (auto v = get("estimator", "L")) run.estimator.loss_bound = ToDouble("estimator.L", *v);

  const std::string* env = get("environment", "key");
  if (!env) throw ConfigError("environment.key is required");
  run.environment = *env;
  if (auto v = get("environment", "true_model")) {
    if (*v == "random") {
      doc.random_true_model = true;
    } else {
      run.true_model = ToUnsigned("environment.true_model", *v);
    }
  }
  run.Validate();
  return doc;
}

ConfigDocument LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseConfig(buffer.str());
}

}  // namespace decbench
