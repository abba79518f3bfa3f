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

// Item and user neighbor graphs, the popularity-penalized counterfactual
// item graph and the normalized augmented adjacency used for propagation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mailrec/dataset.hpp"
#include "mailrec/sparse_matrix.hpp"
#include "mailrec/tape.hpp"
#include "mailrec/tensor.hpp"

namespace mailrec::graph {

struct GraphConfig {
  std::size_t k_base = 10;
  std::size_t k_user = 10;
  std::size_t k_cf = 10;
  double lambda_cf = 0.1;
  double eps = 1e-8;
  double eta = 0.2;
  std::size_t block_size = 1024;
  double alpha_m = 0.5;

  void validate() const;
  void validate(std::size_t user_count, std::size_t item_count) const;
};

// h = alpha_m z_t + (1 - alpha_m) z_v
ad::Var fuse_item_semantics(ad::Var z_text, ad::Var z_visual, double alpha_m);

// Parameter-free embedding for graph construction. Rows are
// [sqrt(a) x_t / |x_t|, sqrt(1 - a) x_v / |x_v|], so the cosine of two rows
// is a * cos_t + (1 - a) * cos_v when both modalities are nonzero.
ad::Tensor graph_embedding(const ad::Tensor& text, const ad::Tensor& visual,
                           double alpha_m);

// Cosine similarities of rows [row_begin, row_end) against all rows of h,
// computed block_size rows at a time. Diagonal entries are -inf.
std::vector<double> cosine_block(const ad::Tensor& h, std::size_t row_begin,
                                 std::size_t row_end, std::size_t block_size);

// s / (pop + eps)^lambda, elementwise. -inf stays -inf.
std::vector<double> counterfactual_scores(std::span<const double> s_row,
                                          std::span<const double> pop,
                                          double lambda_cf, double eps);

// Top-k neighbors of each row by cosine (or by penalized cosine when pop is
// given). Stored weights are always the raw cosine. Ties go to the lower
// index; self is never selected.
SparseMatrix knn_graph(const ad::Tensor& h, std::size_t k,
                       std::size_t block_size);
SparseMatrix topk_counterfactual(const ad::Tensor& h,
                                 std::span<const double> pop,
                                 const GraphConfig& config);
SparseMatrix base_knn_graph(const ad::Tensor& h, const GraphConfig& config);
SparseMatrix user_knn_graph(const ad::Tensor& user_h, const GraphConfig& config);

// base + eta * cf
SparseMatrix fuse_item_graphs(const SparseMatrix& base, const SparseMatrix& cf,
                              double eta);

// Binary user x item matrix of training interactions.
SparseMatrix interaction_matrix(const data::Dataset& dataset);

// [[sym(R_U), R], [R^T, sym(R_I)]] with sym(W) = max(W, W^T). Entries that
// are not positive after symmetrization are dropped.
SparseMatrix build_augmented_adjacency(const SparseMatrix& user_graph,
                                       const SparseMatrix& interactions,
                                       const SparseMatrix& item_graph);

// D^-1/2 A D^-1/2; rows with zero degree stay empty.
SparseMatrix normalize_adjacency(const SparseMatrix& a);

struct GraphArtifacts {
  SparseMatrix base;
  SparseMatrix counterfactual;
  SparseMatrix item_graph;
  SparseMatrix user_graph;
  SparseMatrix adjacency;
  SparseMatrix normalized;
};

// Full graph construction from a dataset with features attached.
GraphArtifacts build_graphs(const data::Dataset& dataset,
                            const GraphConfig& config);

}  // namespace mailrec::graph
