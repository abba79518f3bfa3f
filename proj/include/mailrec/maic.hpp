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

// Modality-aware identity construction: project text/visual features into a
// shared space, derive gates from each modality, use them to modulate a
// static positional encoding, and fuse everything into the initial
// identity e0 of every user and item node.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mailrec/dataset.hpp"
#include "mailrec/tape.hpp"
#include "mailrec/tensor.hpp"

namespace mailrec::maic {

struct ModalityProjection {
  ad::Tensor weight;  // feature_dim x d
  ad::Tensor bias;    // 1 x d
};

struct ModalityGate {
  ad::Tensor weight;  // d x d
  ad::Tensor bias;    // 1 x d
};

struct ProjectionParams {
  ModalityProjection text;
  ModalityProjection visual;
  ModalityGate text_gate;
  ModalityGate visual_gate;

  std::size_t dim() const { return text.weight.cols(); }
  // Stable names used by checkpoints, the optimizer and gradient checks.
  std::vector<ad::NamedTensor> named();
};

// Xavier-initialized projections and gates, zero biases.
ProjectionParams init_params(std::size_t text_dim, std::size_t visual_dim,
                             std::size_t dim, std::uint64_t seed);

struct MaicConfig {
  std::size_t dim = 64;
  double alpha_p = 0.5;  // text share of the fused gate
  double alpha_m = 0.5;  // text share of the fused identity
  // When false the gate is fixed to all ones, so the encoding is unmodulated.
  bool modality_gates = true;

  void validate() const;
};

// Raw features of every node, users first and then items.
struct NodeFeatures {
  ad::Tensor text;
  ad::Tensor visual;
  std::size_t user_count = 0;
  std::size_t item_count = 0;
};

// z = LN(tanh(x W + b)), one row per node.
ad::Var project_modality(ad::Var features, ad::Var weight, ad::Var bias);

// Row u is the mean of the feature rows of u's training items.
ad::Tensor build_user_features(const data::Dataset& dataset,
                               const data::FeatureMatrix& features);
NodeFeatures build_node_features(const data::Dataset& dataset);

// Sinusoidal table: (pos, 2k) = sin(pos / 10000^(2k/d)),
// (pos, 2k+1) = cos(pos / 10000^(2k/d)). d must be even.
ad::Tensor positional_encoding(std::size_t nodes, std::size_t dim);

struct Gates {
  ad::Var text;
  ad::Var visual;
};
// gamma_m = sigmoid(z_m W_g + b_g)
Gates modality_gates(ad::Var z_text, ad::Var z_visual, ad::Var text_weight,
                     ad::Var text_bias, ad::Var visual_weight,
                     ad::Var visual_bias);

struct ModulatedEncoding {
  ad::Var gate;      // g = alpha_p * gamma_t + (1 - alpha_p) * gamma_v
  ad::Var encoding;  // p' = g * p
};
ModulatedEncoding modulate_pe(ad::Var gamma_text, ad::Var gamma_visual,
                              ad::Var positional, double alpha_p);

// e0 = alpha_m (z_t + p') + (1 - alpha_m)(z_v + p')
ad::Var build_identity(ad::Var z_text, ad::Var z_visual, ad::Var encoding,
                       double alpha_m);

// Mean over rows of cos(e0_i, anchor_i).
double semantic_alignment_score(const ad::Tensor& identities,
                                const ad::Tensor& anchors);

struct IdentityState {
  ad::Var z_text;
  ad::Var z_visual;
  ad::Var gate;  // empty when gates are disabled
  ad::Var encoding;
  ad::Var identity;
};

// Full identity construction for all nodes on one tape.
IdentityState construct_identity(ad::Tape& tape, ProjectionParams& params,
                                 const NodeFeatures& features,
                                 const ad::Tensor& positional,
                                 const MaicConfig& config);

}  // namespace mailrec::maic
