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

// Full-ranking evaluation and graph popularity diagnostics.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "mailrec/dataset.hpp"
#include "mailrec/sparse_matrix.hpp"
#include "mailrec/tensor.hpp"

namespace mailrec::eval {

// Items ordered by score descending, then index ascending, with the sorted
// exclusion list removed. limit = 0 keeps the full order.
std::vector<std::size_t> rank_items(std::span<const double> scores,
                                    std::span<const std::size_t> exclude,
                                    std::size_t limit = 0);

// relevant must be sorted. Both raise EmptyDataError on an empty relevant set.
double recall_at_k(std::span<const std::size_t> ranked,
                   std::span<const std::size_t> relevant, std::size_t k);
double ndcg_at_k(std::span<const std::size_t> ranked,
                 std::span<const std::size_t> relevant, std::size_t k);

struct UserMetrics {
  std::size_t user = 0;
  std::map<std::size_t, double> recall;
  std::map<std::size_t, double> ndcg;
};

struct GroupMetrics {
  std::size_t lower = 0;                 // inclusive training-count bound
  std::optional<std::size_t> upper;      // exclusive; none for the last group
  std::size_t users = 0;                 // users in the bucket
  std::size_t evaluated = 0;             // of which have target items
  std::optional<double> recall_at_20;    // absent when nobody was evaluated
};

struct BiasStats {
  double avg_pop = 0.0;
  double tail_ratio = 0.0;
  std::size_t tail_threshold = 0;
  std::size_t edges = 0;
};

struct MetricsReport {
  std::string split;
  std::size_t users_evaluated = 0;
  std::map<std::size_t, double> recall;
  std::map<std::size_t, double> ndcg;
  std::vector<GroupMetrics> groups;
  std::map<std::string, BiasStats> graph_bias;
  std::map<std::string, double> semantic_alignment;

  nlohmann::json to_json() const;
};

// Ranks every item for each user with target items in the chosen split,
// excluding that user's training items (nothing is excluded when the target
// is the training split itself). Users without targets are skipped.
// users, when nonempty, restricts evaluation to those users.
std::vector<UserMetrics> evaluate_users(const ad::Tensor& embeddings,
                                        const data::Dataset& dataset,
                                        data::Split target,
                                        std::span<const std::size_t> ks,
                                        std::span<const std::size_t> users = {});

// Means of evaluate_users. EmptyDataError when the split has no edges.
MetricsReport evaluate(const ad::Tensor& embeddings,
                       const data::Dataset& dataset, data::Split target,
                       std::span<const std::size_t> ks);

// Bucket b holds users whose training count c satisfies
// boundaries[b-1] <= c < boundaries[b].
std::vector<std::vector<std::size_t>> sparsity_groups(
    const data::Dataset& dataset, std::span<const std::size_t> boundaries);
std::vector<GroupMetrics> evaluate_per_group(
    const ad::Tensor& embeddings, const data::Dataset& dataset,
    data::Split target, std::span<const std::size_t> boundaries);

// Largest count among the bottom tail_quantile share of items.
std::size_t tail_threshold(std::span<const std::size_t> counts,
                           double tail_quantile);

// Mean neighbor popularity ln(1 + n_j) and share of neighbors whose count
// is at or below the tail threshold, over all stored edges.
BiasStats graph_bias_stats(const SparseMatrix& graph,
                           std::span<const std::size_t> item_counts,
                           double tail_quantile);

nlohmann::json to_json(const BiasStats& stats);

}  // namespace mailrec::eval
