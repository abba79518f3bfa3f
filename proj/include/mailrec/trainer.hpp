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

// Epoch orchestration: shuffling, negative sampling, Adam updates,
// validation-driven early stopping and ablation variants.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mailrec/dataset.hpp"
#include "mailrec/graph.hpp"
#include "mailrec/model.hpp"
#include "mailrec/optim.hpp"

namespace mailrec::train {

struct TrainerConfig {
  AdamConfig adam;
  std::size_t batch_size = 2048;
  std::size_t max_epochs = 1000;
  std::size_t patience = 20;
  std::size_t eval_every = 1;
  std::uint64_t seed = 42;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  std::size_t batches = 0;
  double loss = 0.0;
  double rec = 0.0;
  double mm = 0.0;
  double sce = 0.0;
  std::optional<double> valid_recall;  // Recall@20 on the validation split
  std::optional<double> valid_ndcg;    // NDCG@20 on the validation split
  bool improved = false;

  nlohmann::json to_json() const;
};

struct RunResult {
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;  // 0 when no evaluation happened
  double best_recall = 0.0;
  bool early_stopped = false;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Largest per-user training degree; n_neg must not exceed
// item_count - max_train_degree.
std::size_t max_train_degree(const data::Dataset& dataset);
void check_negative_budget(const data::Dataset& dataset, std::size_t n_neg);

// n_neg distinct items outside the user's training positives, uniformly.
std::vector<std::size_t> sample_negatives(const data::Dataset& dataset,
                                          std::size_t user, std::size_t n_neg,
                                          std::mt19937_64& rng);

// Shuffles pairs in place and splits them into consecutive [begin, end)
// ranges of batch_size; the last range may be shorter.
std::vector<std::pair<std::size_t, std::size_t>> shuffle_into_batches(
    std::vector<data::Edge>& pairs, std::size_t batch_size, std::mt19937_64& rng);

// Runs the training loop. On return the model holds the parameters of the
// best validation epoch rounded to float32 (or its initial parameters when
// no evaluation happened).
RunResult train(const data::Dataset& dataset, model::MailModel& model,
                const TrainerConfig& config, const EpochCallback& on_epoch = {});

enum class Variant { kFull, kNoMaic, kNoCna, kNoSce, kNoMm };

Variant parse_variant(const std::string& name);
const char* to_string(Variant v);

// Applies an ablation to the configs. no_mm additionally needs
// randomize_features on the dataset.
void ablation_config(Variant v, model::ModelConfig& model_config,
                     graph::GraphConfig& graph_config);

// Replaces both feature matrices with seeded random unit-norm rows of the
// same dimensions.
void randomize_features(data::Dataset& dataset, std::uint64_t seed);

}  // namespace mailrec::train
