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

// Propagation over the normalized augmented graph, the loss terms of the
// training objective and the model bundle that ties them to the identity
// construction.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mailrec/dataset.hpp"
#include "mailrec/maic.hpp"
#include "mailrec/sparse_matrix.hpp"
#include "mailrec/tape.hpp"

namespace mailrec::model {

struct PropagationOutput {
  std::vector<ad::Var> layers;  // E(0) .. E(L)
  ad::Var final;                // mean over all layers
};

// E(l+1) = A E(l); the readout averages layers 0..L. a must outlive the tape.
PropagationOutput propagate(const SparseMatrix& a, ad::Var e0,
                            std::size_t layers);

struct LossWeights {
  double tau = 0.2;
  double tau_a = 0.2;
  double tau_d = 0.2;
  double lambda_m = 0.1;
  double lambda_s = 0.01;
  std::size_t n_neg = 32;

  void validate() const;
};

// Distinct users and items of a batch of (user, item) pairs, plus the
// positive mask between them. Indices are dataset indices, not node ids.
struct BatchIndex {
  std::vector<std::size_t> users;
  std::vector<std::size_t> items;
  std::vector<std::uint8_t> positive;  // users.size() x items.size()
};

// Pairs always count as positives. When a dataset is given, any training
// interaction between a batch user and a batch item does too.
BatchIndex index_batch(std::span<const data::Edge> pairs,
                       const data::Dataset* dataset = nullptr);

// All node-level tensors below are (user_count + item_count) x d with users
// first.

// Cross-stage alignment between E(0) and E(1), user side plus item side.
ad::Var alignment_loss(ad::Var e0, ad::Var e1, std::size_t user_count,
                       const BatchIndex& batch, double tau_a);

// Decoupled discrimination: numerator pairs e0 with m, denominator pairs e0
// with the readout of every batch node of the same type.
ad::Var discrimination_loss(ad::Var e0, ad::Var m, ad::Var final,
                            std::size_t user_count, const BatchIndex& batch,
                            double tau_d);

ad::Var sce_loss(ad::Var alignment, ad::Var discrimination);

// Inner-product preference score.
double score(std::span<const double> e_u, std::span<const double> e_i);

struct RankingBatch {
  std::vector<std::size_t> users;
  std::vector<std::size_t> positives;
  std::vector<std::size_t> negatives;  // users.size() x n_neg, row-major
  std::size_t n_neg = 0;
};

// Mean over samples of logsumexp_k((cos(u, neg_k) - cos(u, pos)) / tau).
// With a dataset, negatives that are training positives raise ContractError.
ad::Var ranking_loss(ad::Var final, std::size_t user_count,
                     const RankingBatch& batch, double tau,
                     const data::Dataset* dataset = nullptr);

// Symmetric InfoNCE between text and visual projections of the given
// (distinct) item nodes.
ad::Var modal_infonce(ad::Var z_text, ad::Var z_visual,
                      std::span<const std::size_t> nodes, double tau);

ad::Var total_loss(ad::Var rec, ad::Var mm, ad::Var sce,
                   const LossWeights& weights);

struct LossParts {
  ad::Var rec;
  ad::Var mm;
  ad::Var alignment;
  ad::Var discrimination;
  ad::Var sce;
  ad::Var total;
};

struct ModelConfig {
  maic::MaicConfig maic;
  std::size_t layers = 2;
  LossWeights weights;

  void validate() const;
};

// Parameters plus everything static the forward pass needs.
class MailModel {
 public:
  MailModel(const data::Dataset& dataset, SparseMatrix normalized,
            ModelConfig config, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  maic::ProjectionParams& params() { return params_; }
  std::vector<ad::NamedTensor> named_params() { return params_.named(); }
  const maic::NodeFeatures& features() const { return features_; }
  const ad::Tensor& positional() const { return positional_; }
  const SparseMatrix& adjacency() const { return adjacency_; }
  std::size_t user_count() const { return features_.user_count; }
  std::size_t item_count() const { return features_.item_count; }

  LossParts forward(ad::Tape& tape, std::span<const data::Edge> pairs,
                    const RankingBatch& ranking,
                    const data::Dataset* dataset = nullptr);

  // Final readout for every node (users first).
  ad::Tensor embed();
  // Identity tensors for diagnostics; gates can be forced off.
  ad::Tensor identity(bool modality_gates);
  // Fused projected semantics m = alpha_m z_t + (1 - alpha_m) z_v.
  ad::Tensor fused_semantics();

 private:
  ModelConfig config_;
  maic::ProjectionParams params_;
  maic::NodeFeatures features_;
  ad::Tensor positional_;
  SparseMatrix adjacency_;
};

}  // namespace mailrec::model
