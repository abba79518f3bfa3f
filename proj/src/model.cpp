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

#include "mailrec/model.hpp"

#include <algorithm>
#include <string>

#include "mailrec/errors.hpp"
#include "mailrec/graph.hpp"
#include "mailrec/ops.hpp"

namespace mailrec::model {

namespace {

constexpr double kMasked = -1e30;

// Row-wise dot product of two equally shaped matrices as an (n x 1) column.
ad::Var row_dot(ad::Var a, ad::Var b) {
  ad::Var ones = a.tape()->constant(ad::Tensor::filled({a.shape().cols, 1}, 1.0));
  return ad::matmul(ad::elementwise_mul(a, b), ones);
}

ad::Var mean_all(ad::Var column) {
  return ad::scalar_mul(ad::sum(column),
                        1.0 / static_cast<double>(column.shape().size()));
}

std::vector<std::size_t> offset(std::span<const std::size_t> idx,
                                std::size_t by) {
  std::vector<std::size_t> out(idx.begin(), idx.end());
  for (auto& v : out) v += by;
  return out;
}

ad::Var unit_rows(ad::Var x, std::span<const std::size_t> rows) {
  return ad::l2_normalize_rows(ad::gather_rows(x, rows));
}

// -log(sum_pos exp(c) / sum_all exp(c)) averaged over anchors, where c are
// cosine logits between anchors and candidates.
ad::Var masked_contrast(ad::Var anchors, ad::Var candidates,
                        const std::vector<double>& mask, double tau) {
  ad::Var logits = ad::scalar_mul(
      ad::matmul(anchors, candidates, ad::Trans::kYes), 1.0 / tau);
  ad::Var m = anchors.tape()->constant(ad::Tensor(logits.shape(), mask));
  ad::Var per_row =
      ad::sub(ad::logsumexp_rows(logits), ad::logsumexp_rows(ad::add(logits, m)));
  return mean_all(per_row);
}

}  // namespace

PropagationOutput propagate(const SparseMatrix& a, ad::Var e0,
                            std::size_t layers) {
  if (a.rows() != a.cols() || a.cols() != e0.shape().rows) {
    throw ShapeError("propagate: adjacency " + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs embeddings " +
                     e0.shape().str());
  }
  PropagationOutput out;
  out.layers.push_back(e0);
  ad::Var acc = e0;
  for (std::size_t l = 0; l < layers; ++l) {
    out.layers.push_back(ad::sparse_dense_matmul(a, out.layers.back()));
    acc = ad::add(acc, out.layers.back());
  }
  out.final = layers == 0
                  ? e0
                  : ad::scalar_mul(acc, 1.0 / static_cast<double>(layers + 1));
  return out;
}

void LossWeights::validate() const {
  if (!(tau > 0.0) || !(tau_a > 0.0) || !(tau_d > 0.0)) {
    throw ConfigError("temperatures must be > 0");
  }
  if (!(lambda_m >= 0.0) || !(lambda_s >= 0.0)) {
    throw ConfigError("loss weights must be >= 0");
  }
  if (n_neg == 0) throw ConfigError("n_neg must be >= 1");
}

BatchIndex index_batch(std::span<const data::Edge> pairs,
                       const data::Dataset* dataset) {
  BatchIndex b;
  for (const auto& e : pairs) {
    b.users.push_back(e.user);
    b.items.push_back(e.item);
  }
  std::sort(b.users.begin(), b.users.end());
  b.users.erase(std::unique(b.users.begin(), b.users.end()), b.users.end());
  std::sort(b.items.begin(), b.items.end());
  b.items.erase(std::unique(b.items.begin(), b.items.end()), b.items.end());
  const std::size_t ni = b.items.size();
  b.positive.assign(b.users.size() * ni, 0);
  auto pos_of = [](const std::vector<std::size_t>& v, std::size_t x) {
    return static_cast<std::size_t>(
        std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };
  for (const auto& e : pairs) {
    b.positive[pos_of(b.users, e.user) * ni + pos_of(b.items, e.item)] = 1;
  }
  if (dataset != nullptr) {
    for (std::size_t u = 0; u < b.users.size(); ++u) {
      for (std::size_t i : dataset->items_of(b.users[u], data::Split::kTrain)) {
        const std::size_t k = pos_of(b.items, i);
        if (k < ni && b.items[k] == i) b.positive[u * ni + k] = 1;
      }
    }
  }
  return b;
}

ad::Var alignment_loss(ad::Var e0, ad::Var e1, std::size_t user_count,
                       const BatchIndex& batch, double tau_a) {
  if (batch.users.empty() || batch.items.empty()) {
    throw ContractError("alignment_loss: empty batch");
  }
  const std::size_t nu = batch.users.size();
  const std::size_t ni = batch.items.size();
  std::vector<double> user_mask(nu * ni, kMasked);
  std::vector<double> item_mask(ni * nu, kMasked);
  std::vector<std::size_t> user_hits(nu, 0);
  std::vector<std::size_t> item_hits(ni, 0);
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t i = 0; i < ni; ++i) {
      if (!batch.positive[u * ni + i]) continue;
      user_mask[u * ni + i] = 0.0;
      item_mask[i * nu + u] = 0.0;
      ++user_hits[u];
      ++item_hits[i];
    }
  }
  if (std::count(user_hits.begin(), user_hits.end(), 0) > 0 ||
      std::count(item_hits.begin(), item_hits.end(), 0) > 0) {
    throw ContractError("alignment_loss: batch node without a positive");
  }
  const auto item_nodes = offset(batch.items, user_count);
  ad::Var user_side =
      masked_contrast(unit_rows(e0, batch.users), unit_rows(e1, item_nodes),
                      user_mask, tau_a);
  ad::Var item_side =
      masked_contrast(unit_rows(e0, item_nodes), unit_rows(e1, batch.users),
                      item_mask, tau_a);
  return ad::add(user_side, item_side);
}

ad::Var discrimination_loss(ad::Var e0, ad::Var m, ad::Var final,
                            std::size_t user_count, const BatchIndex& batch,
                            double tau_d) {
  auto side = [&](std::span<const std::size_t> nodes) {
    ad::Var anchor = unit_rows(e0, nodes);
    ad::Var numerator =
        ad::scalar_mul(row_dot(anchor, unit_rows(m, nodes)), 1.0 / tau_d);
    ad::Var logits = ad::scalar_mul(
        ad::matmul(anchor, unit_rows(final, nodes), ad::Trans::kYes),
        1.0 / tau_d);
    return mean_all(ad::sub(ad::logsumexp_rows(logits), numerator));
  };
  if (batch.users.empty() || batch.items.empty()) {
    throw ContractError("discrimination_loss: empty batch");
  }
  const auto item_nodes = offset(batch.items, user_count);
  return ad::add(side(batch.users), side(item_nodes));
}

ad::Var sce_loss(ad::Var alignment, ad::Var discrimination) {
  return ad::add(alignment, discrimination);
}

double score(std::span<const double> e_u, std::span<const double> e_i) {
  if (e_u.size() != e_i.size()) throw ShapeError("score: dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < e_u.size(); ++k) s += e_u[k] * e_i[k];
  return s;
}

ad::Var ranking_loss(ad::Var final, std::size_t user_count,
                     const RankingBatch& batch, double tau,
                     const data::Dataset* dataset) {
  const std::size_t b = batch.users.size();
  const std::size_t k = batch.n_neg;
  if (b == 0) throw ContractError("ranking_loss: empty batch");
  if (k == 0 || batch.positives.size() != b || batch.negatives.size() != b * k) {
    throw ShapeError("ranking_loss: inconsistent batch layout");
  }
  for (std::size_t s = 0; s < b; ++s) {
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t neg = batch.negatives[s * k + t];
      bool bad = neg == batch.positives[s];
      if (!bad && dataset != nullptr) {
        const auto pos = dataset->items_of(batch.users[s], data::Split::kTrain);
        bad = std::binary_search(pos.begin(), pos.end(), neg);
      }
      if (bad) {
        throw ContractError("ranking_loss: negative item " + std::to_string(neg) +
                            " is a positive of user " +
                            std::to_string(batch.users[s]));
      }
    }
  }
  ad::Var users = unit_rows(final, batch.users);
  ad::Var pos_cos = row_dot(users, unit_rows(final, offset(batch.positives, user_count)));
  std::vector<std::size_t> repeat(b * k);
  for (std::size_t s = 0; s < b * k; ++s) repeat[s] = s / k;
  ad::Var neg_cos = ad::reshape(
      row_dot(ad::gather_rows(users, repeat),
              unit_rows(final, offset(batch.negatives, user_count))),
      {b, k});
  ad::Var logits = ad::scalar_mul(ad::sub(neg_cos, pos_cos), 1.0 / tau);
  return mean_all(ad::logsumexp_rows(logits));
}

ad::Var modal_infonce(ad::Var z_text, ad::Var z_visual,
                      std::span<const std::size_t> nodes, double tau) {
  if (nodes.empty()) throw ContractError("modal_infonce: empty batch");
  ad::Var t = unit_rows(z_text, nodes);
  ad::Var v = unit_rows(z_visual, nodes);
  ad::Var diag = ad::scalar_mul(row_dot(t, v), 1.0 / tau);
  ad::Var tv = ad::scalar_mul(ad::matmul(t, v, ad::Trans::kYes), 1.0 / tau);
  ad::Var vt = ad::scalar_mul(ad::matmul(v, t, ad::Trans::kYes), 1.0 / tau);
  ad::Var a = mean_all(ad::sub(ad::logsumexp_rows(tv), diag));
  ad::Var c = mean_all(ad::sub(ad::logsumexp_rows(vt), diag));
  return ad::scalar_mul(ad::add(a, c), 0.5);
}

ad::Var total_loss(ad::Var rec, ad::Var mm, ad::Var sce,
                   const LossWeights& weights) {
  return ad::add(ad::add(rec, ad::scalar_mul(mm, weights.lambda_m)),
                 ad::scalar_mul(sce, weights.lambda_s));
}

void ModelConfig::validate() const {
  maic.validate();
  weights.validate();
}

MailModel::MailModel(const data::Dataset& dataset, SparseMatrix normalized,
                     ModelConfig config, std::uint64_t seed)
    : config_(config), adjacency_(std::move(normalized)) {
  config_.validate();
  features_ = maic::build_node_features(dataset);
  if (adjacency_.rows() != dataset.node_count() ||
      adjacency_.cols() != dataset.node_count()) {
    throw ShapeError("model: adjacency does not match the dataset node count");
  }
  params_ = maic::init_params(features_.text.cols(), features_.visual.cols(),
                              config_.maic.dim, seed);
  positional_ = maic::positional_encoding(dataset.node_count(), config_.maic.dim);
}

LossParts MailModel::forward(ad::Tape& tape, std::span<const data::Edge> pairs,
                             const RankingBatch& ranking,
                             const data::Dataset* dataset) {
  const auto ids =
      maic::construct_identity(tape, params_, features_, positional_, config_.maic);
  const auto prop = propagate(adjacency_, ids.identity, config_.layers);
  const LossWeights& w = config_.weights;
  const std::size_t nu = user_count();

  LossParts parts;
  parts.rec = ranking_loss(prop.final, nu, ranking, w.tau, dataset);

  const BatchIndex batch = index_batch(pairs, dataset);
  parts.mm = modal_infonce(ids.z_text, ids.z_visual, offset(batch.items, nu), w.tau);

  ad::Var e1 = prop.layers.size() > 1 ? prop.layers[1] : prop.layers[0];
  ad::Var m = graph::fuse_item_semantics(ids.z_text, ids.z_visual,
                                         config_.maic.alpha_m);
  parts.alignment = alignment_loss(ids.identity, e1, nu, batch, w.tau_a);
  parts.discrimination =
      discrimination_loss(ids.identity, m, prop.final, nu, batch, w.tau_d);
  parts.sce = sce_loss(parts.alignment, parts.discrimination);
  parts.total = total_loss(parts.rec, parts.mm, parts.sce, w);
  return parts;
}

ad::Tensor MailModel::embed() {
  ad::Tape tape;
  const auto ids =
      maic::construct_identity(tape, params_, features_, positional_, config_.maic);
  return ad::Tensor(propagate(adjacency_, ids.identity, config_.layers).final.value());
}

ad::Tensor MailModel::identity(bool modality_gates) {
  ad::Tape tape;
  maic::MaicConfig c = config_.maic;
  c.modality_gates = modality_gates;
  const auto ids = maic::construct_identity(tape, params_, features_, positional_, c);
  return ad::Tensor(ids.identity.value());
}

ad::Tensor MailModel::fused_semantics() {
  ad::Tape tape;
  const auto ids =
      maic::construct_identity(tape, params_, features_, positional_, config_.maic);
  return ad::Tensor(graph::fuse_item_semantics(ids.z_text, ids.z_visual,
                                               config_.maic.alpha_m)
                        .value());
}

}  // namespace mailrec::model
