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

#pragma once

// Resolved run configuration. Every tunable is addressable by one flat key,
// used both in JSON config files and (with '-' for '_') as a CLI flag.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "mailrec/graph.hpp"
#include "mailrec/model.hpp"
#include "mailrec/trainer.hpp"

namespace mailrec {

struct RunConfig {
  model::ModelConfig model;
  graph::GraphConfig graph;
  train::TrainerConfig trainer;
  std::string variant = "full";
  std::vector<std::size_t> ks{10, 20};
  double tail_quantile = 0.8;
  std::vector<std::size_t> sparsity_boundaries{5, 10, 15, 20};
  std::size_t k_core = 5;

  // Validates every module config plus cross-field constraints.
  void validate() const;

  nlohmann::json to_json() const;
  // Overrides the keys present in j; unknown keys raise ConfigError.
  void merge_json(const nlohmann::json& j);

  // Calls f(key, field) for every tunable. alpha_m is shared between the
  // identity and graph configs and is kept in sync by sync().
  template <class F>
  void visit(F&& f) {
    f("dim", model.maic.dim);
    f("alpha_p", model.maic.alpha_p);
    f("alpha_m", model.maic.alpha_m);
    f("layers", model.layers);
    f("tau", model.weights.tau);
    f("tau_a", model.weights.tau_a);
    f("tau_d", model.weights.tau_d);
    f("lambda_m", model.weights.lambda_m);
    f("lambda_s", model.weights.lambda_s);
    f("n_neg", model.weights.n_neg);
    f("lambda_cf", graph.lambda_cf);
    f("eps", graph.eps);
    f("eta", graph.eta);
    f("k_base", graph.k_base);
    f("k_user", graph.k_user);
    f("k_cf", graph.k_cf);
    f("block_size", graph.block_size);
    f("lr", trainer.adam.lr);
    f("beta1", trainer.adam.beta1);
    f("beta2", trainer.adam.beta2);
    f("adam_eps", trainer.adam.eps);
    f("batch_size", trainer.batch_size);
    f("max_epochs", trainer.max_epochs);
    f("patience", trainer.patience);
    f("eval_every", trainer.eval_every);
    f("seed", trainer.seed);
    f("variant", variant);
    f("ks", ks);
    f("tail_quantile", tail_quantile);
    f("sparsity_boundaries", sparsity_boundaries);
    f("k_core", k_core);
  }

  // Copies shared values into the configs that need them.
  void sync() { graph.alpha_m = model.maic.alpha_m; }

  // Model and graph configs with the ablation variant applied.
  model::ModelConfig effective_model() const;
  graph::GraphConfig effective_graph() const;
};

RunConfig load_run_config(const std::string& path);

}  // namespace mailrec
