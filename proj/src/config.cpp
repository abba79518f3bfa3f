// Copyright 2026 The mailrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mailrec/config.hpp"

#include <fstream>
#include <set>

#include "mailrec/errors.hpp"

namespace mailrec {

void RunConfig::validate() const {
  RunConfig c = *this;
  c.sync();
  c.model.validate();
  c.graph.validate();
  c.trainer.validate();
  train::parse_variant(variant);
  if (ks.empty()) throw ConfigError("ks must not be empty");
  for (std::size_t k : ks) {
    if (k == 0) throw ConfigError("ks entries must be >= 1");
  }
  if (!(tail_quantile > 0.0 && tail_quantile < 1.0)) {
    throw ConfigError("tail_quantile must lie in (0, 1)");
  }
  for (std::size_t b = 1; b < sparsity_boundaries.size(); ++b) {
    if (sparsity_boundaries[b] <= sparsity_boundaries[b - 1]) {
      throw ConfigError("sparsity_boundaries must be strictly ascending");
    }
  }
  if (k_core == 0) throw ConfigError("k_core must be >= 1");
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  const_cast<RunConfig*>(this)->visit(
      [&](const char* key, auto& field) { j[key] = field; });
  return j;
}

void RunConfig::merge_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  std::set<std::string> known;
  visit([&](const char* key, auto& field) {
    known.insert(key);
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
  });
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  sync();
}

model::ModelConfig RunConfig::effective_model() const {
  model::ModelConfig m = model;
  graph::GraphConfig g = effective_graph();
  train::ablation_config(train::parse_variant(variant), m, g);
  return m;
}

graph::GraphConfig RunConfig::effective_graph() const {
  model::ModelConfig m = model;
  graph::GraphConfig g = graph;
  g.alpha_m = model.maic.alpha_m;
  train::ablation_config(train::parse_variant(variant), m, g);
  return g;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  RunConfig c;
  c.merge_json(j);
  return c;
}

}  // namespace mailrec
