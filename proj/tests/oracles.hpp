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

// Brute-force reference implementations used by the unit and acceptance
// tests. Deliberately simple and unblocked.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <string>
#include <utility>

#include "mailrec/dataset.hpp"
#include "mailrec/grad_check.hpp"
#include "mailrec/model.hpp"
#include "mailrec/sparse_matrix.hpp"
#include "mailrec/tensor.hpp"

namespace mailrec::testing {

struct NeighborRow {
  std::vector<std::uint32_t> order;  // score descending, index ascending
  std::vector<double> weights;       // raw cosine, parallel to order
};

// Full sort of every row. pop empty means no penalty.
std::vector<NeighborRow> knn_oracle(const ad::Tensor& h, std::size_t k,
                                    std::span<const double> pop = {},
                                    double lambda_cf = 0.0, double eps = 1e-8);

// Exact comparison of sets and weights; the CSR row is column-sorted.
bool matches_oracle(const SparseMatrix& g, const std::vector<NeighborRow>& rows);

// Column sets per row.
std::vector<std::vector<std::uint32_t>> neighbor_sets(const SparseMatrix& g);

double power_iteration_radius(const SparseMatrix& a, std::size_t iterations,
                              std::uint64_t seed);

// Random symmetric non-negative graph with about `degree` edges per node and
// some isolated nodes.
SparseMatrix random_symmetric_graph(std::size_t n, std::size_t degree,
                                    std::uint64_t seed);

// Rank of every item by counting better-scored candidates.
double recall_oracle(std::span<const double> scores,
                     std::span<const std::size_t> exclude,
                     std::span<const std::size_t> relevant, std::size_t k);
double ndcg_oracle(std::span<const double> scores,
                   std::span<const std::size_t> exclude,
                   std::span<const std::size_t> relevant, std::size_t k);

struct DebiasOutcome {
  double base_pop = 0.0;
  double cf_pop = 0.0;
  double base_tail = 0.0;
  double cf_tail = 0.0;
  bool holds() const { return cf_pop < base_pop && cf_tail > base_tail; }
};

// Zipf(1.2) popularity over `items` items with random unit features.
DebiasOutcome debias_trial(std::uint64_t seed, std::size_t items = 500,
                           double lambda_cf = 0.5, std::size_t k = 10);

// A 5-user, 6-item, d = 8 model instance with one batch over all training
// pairs and one negative per pair.
struct LossInstance {
  data::Dataset dataset;
  std::vector<data::Edge> pairs;
  model::RankingBatch ranking;
};
LossInstance small_loss_instance(std::uint64_t seed);

// grad_check of every loss term and the total against the projection
// parameters (step 1e-4, tolerance 1e-4).
std::vector<std::pair<std::string, ad::GradCheckReport>> check_loss_gradients(
    std::uint64_t seed);

}  // namespace mailrec::testing
