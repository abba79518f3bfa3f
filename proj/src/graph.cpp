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

#include "mailrec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mailrec/errors.hpp"
#include "mailrec/kernels.hpp"
#include "mailrec/maic.hpp"
#include "mailrec/ops.hpp"

namespace mailrec::graph {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_k(std::size_t k, std::size_t n, const char* what) {
  if (k == 0 || k >= n) {
    throw ConfigError(std::string(what) + " = " + std::to_string(k) +
                      " must lie in [1, " + std::to_string(n) + ")");
  }
}

// Shared selection loop. divisor, when nonempty, holds (pop_j + eps)^lambda.
SparseMatrix select_neighbors(const ad::Tensor& h, std::size_t k,
                              std::span<const double> divisor,
                              std::size_t block_size) {
  const std::size_t n = h.rows();
  check_k(k, n, "neighbor count");
  if (block_size == 0) throw ConfigError("block_size must be >= 1");
  const auto view = h.view();
  std::vector<double> norms(n);
  kernels::parallel::row_norms(view, norms);

  std::vector<std::uint64_t> row_ptr(n + 1, 0);
  std::vector<std::uint32_t> cols;
  std::vector<double> values;
  cols.reserve(n * k);
  values.reserve(n * k);

  std::vector<double> sims;
  std::vector<double> scores;
  std::vector<std::uint32_t> picks;
  for (std::size_t begin = 0; begin < n; begin += block_size) {
    const std::size_t end = std::min(n, begin + block_size);
    const std::size_t rows = end - begin;
    sims.assign(rows * n, 0.0);
    kernels::parallel::cosine_rows(view, norms, begin, end, sims);
    const double* ranked = sims.data();
    if (!divisor.empty()) {
      scores.resize(sims.size());
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < n; ++j) {
          scores[r * n + j] = sims[r * n + j] / divisor[j];
        }
      }
      ranked = scores.data();
    }
    picks.assign(rows * k, kernels::kNoIndex);
    kernels::parallel::topk_rows({ranked, rows, n}, k, picks);
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<std::pair<std::uint32_t, double>> row;
      for (std::size_t t = 0; t < k; ++t) {
        const std::uint32_t j = picks[r * k + t];
        if (j == kernels::kNoIndex) continue;
        row.emplace_back(j, sims[r * n + j]);
      }
      std::sort(row.begin(), row.end());
      for (const auto& [j, w] : row) {
        cols.push_back(j);
        values.push_back(w);
      }
      row_ptr[begin + r + 1] = cols.size();
    }
  }
  return SparseMatrix(n, n, std::move(row_ptr), std::move(cols),
                      std::move(values));
}

std::vector<double> penalty_divisor(std::span<const double> pop,
                                    double lambda_cf, double eps) {
  std::vector<double> out(pop.size());
  for (std::size_t j = 0; j < pop.size(); ++j) {
    out[j] = std::pow(pop[j] + eps, lambda_cf);
  }
  return out;
}

}  // namespace

void GraphConfig::validate() const {
  if (!(lambda_cf >= 0.0)) throw ConfigError("lambda_cf must be >= 0");
  if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
  if (!(eta >= 0.0)) throw ConfigError("eta must be >= 0");
  if (block_size == 0) throw ConfigError("block_size must be >= 1");
  if (k_base == 0 || k_user == 0 || k_cf == 0) {
    throw ConfigError("neighbor counts must be >= 1");
  }
  if (!(alpha_m >= 0.0 && alpha_m <= 1.0)) {
    throw ConfigError("alpha_m must lie in [0, 1]");
  }
}

void GraphConfig::validate(std::size_t user_count,
                           std::size_t item_count) const {
  validate();
  check_k(k_base, item_count, "k_base");
  check_k(k_cf, item_count, "k_cf");
  check_k(k_user, user_count, "k_user");
}

ad::Var fuse_item_semantics(ad::Var z_text, ad::Var z_visual, double alpha_m) {
  if (z_text.shape() != z_visual.shape()) {
    throw ShapeError("fuse_item_semantics: " + z_text.shape().str() + " vs " +
                     z_visual.shape().str());
  }
  return ad::add(z_visual, ad::scalar_mul(ad::sub(z_text, z_visual), alpha_m));
}

ad::Tensor graph_embedding(const ad::Tensor& text, const ad::Tensor& visual,
                           double alpha_m) {
  if (text.rows() != visual.rows()) {
    throw ShapeError("graph_embedding: row counts differ");
  }
  const std::size_t n = text.rows();
  const std::size_t dt = text.cols();
  const std::size_t dv = visual.cols();
  const double wt = std::sqrt(alpha_m);
  const double wv = std::sqrt(1.0 - alpha_m);
  std::vector<double> out(n * (dt + dv));
  for (std::size_t i = 0; i < n; ++i) {
    double nt = 0.0;
    double nv = 0.0;
    for (std::size_t k = 0; k < dt; ++k) nt += text(i, k) * text(i, k);
    for (std::size_t k = 0; k < dv; ++k) nv += visual(i, k) * visual(i, k);
    const double st = wt / std::max(std::sqrt(nt), kernels::kCosineStabilizer);
    const double sv = wv / std::max(std::sqrt(nv), kernels::kCosineStabilizer);
    double* row = out.data() + i * (dt + dv);
    for (std::size_t k = 0; k < dt; ++k) row[k] = text(i, k) * st;
    for (std::size_t k = 0; k < dv; ++k) row[dt + k] = visual(i, k) * sv;
  }
  return ad::Tensor({n, dt + dv}, std::move(out));
}

std::vector<double> cosine_block(const ad::Tensor& h, std::size_t row_begin,
                                 std::size_t row_end, std::size_t block_size) {
  if (block_size == 0) throw ConfigError("block_size must be >= 1");
  if (row_begin > row_end || row_end > h.rows()) {
    throw ShapeError("cosine_block: row range out of bounds");
  }
  const std::size_t n = h.rows();
  std::vector<double> norms(n);
  kernels::parallel::row_norms(h.view(), norms);
  std::vector<double> out((row_end - row_begin) * n);
  for (std::size_t b = row_begin; b < row_end; b += block_size) {
    const std::size_t e = std::min(row_end, b + block_size);
    kernels::parallel::cosine_rows(
        h.view(), norms, b, e,
        std::span<double>(out).subspan((b - row_begin) * n, (e - b) * n));
  }
  return out;
}

std::vector<double> counterfactual_scores(std::span<const double> s_row,
                                          std::span<const double> pop,
                                          double lambda_cf, double eps) {
  if (s_row.size() != pop.size()) {
    throw ShapeError("counterfactual_scores: length mismatch");
  }
  if (!(eps > 0.0)) throw ConfigError("eps must be > 0");
  const auto divisor = penalty_divisor(pop, lambda_cf, eps);
  std::vector<double> out(s_row.size());
  for (std::size_t j = 0; j < s_row.size(); ++j) out[j] = s_row[j] / divisor[j];
  return out;
}

SparseMatrix knn_graph(const ad::Tensor& h, std::size_t k,
                       std::size_t block_size) {
  return select_neighbors(h, k, {}, block_size);
}

SparseMatrix topk_counterfactual(const ad::Tensor& h,
                                 std::span<const double> pop,
                                 const GraphConfig& config) {
  config.validate();
  if (pop.size() != h.rows()) {
    throw ShapeError("topk_counterfactual: popularity length mismatch");
  }
  const auto divisor = penalty_divisor(pop, config.lambda_cf, config.eps);
  return select_neighbors(h, config.k_cf, divisor, config.block_size);
}

SparseMatrix base_knn_graph(const ad::Tensor& h, const GraphConfig& config) {
  return knn_graph(h, config.k_base, config.block_size);
}

SparseMatrix user_knn_graph(const ad::Tensor& user_h,
                            const GraphConfig& config) {
  return knn_graph(user_h, config.k_user, config.block_size);
}

SparseMatrix fuse_item_graphs(const SparseMatrix& base, const SparseMatrix& cf,
                              double eta) {
  if (base.rows() != cf.rows() || base.cols() != cf.cols()) {
    throw ShapeError("fuse_item_graphs: shapes differ");
  }
  if (eta == 0.0) return base;
  auto triplets = base.triplets();
  for (const auto& t : cf.triplets()) {
    triplets.push_back({t.row, t.col, eta * t.value});
  }
  return SparseMatrix::from_triplets(base.rows(), base.cols(),
                                     std::move(triplets), DuplicatePolicy::kSum);
}

SparseMatrix interaction_matrix(const data::Dataset& dataset) {
  std::vector<Triplet> t;
  for (const auto& e : dataset.edges(data::Split::kTrain)) {
    t.push_back({e.user, e.item, 1.0});
  }
  return SparseMatrix::from_triplets(dataset.user_count(), dataset.item_count(),
                                     std::move(t));
}

SparseMatrix build_augmented_adjacency(const SparseMatrix& user_graph,
                                       const SparseMatrix& interactions,
                                       const SparseMatrix& item_graph) {
  const std::size_t nu = interactions.rows();
  const std::size_t ni = interactions.cols();
  if (user_graph.rows() != nu || user_graph.cols() != nu ||
      item_graph.rows() != ni || item_graph.cols() != ni) {
    throw ShapeError("augmented adjacency: block dimensions do not conform");
  }
  const SparseMatrix ru = user_graph.symmetrize_max().prune_nonpositive();
  const SparseMatrix ri = item_graph.symmetrize_max().prune_nonpositive();
  std::vector<Triplet> t;
  t.reserve(ru.nnz() + ri.nnz() + 2 * interactions.nnz());
  for (const auto& e : ru.triplets()) t.push_back(e);
  for (const auto& e : interactions.triplets()) {
    if (e.value <= 0.0) continue;
    t.push_back({e.row, nu + e.col, e.value});
    t.push_back({nu + e.col, e.row, e.value});
  }
  for (const auto& e : ri.triplets()) t.push_back({nu + e.row, nu + e.col, e.value});
  return SparseMatrix::from_triplets(nu + ni, nu + ni, std::move(t));
}

SparseMatrix normalize_adjacency(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("normalize_adjacency: not square");
  for (double v : a.values()) {
    if (v < 0.0) throw ContractError("normalize_adjacency: negative entry");
  }
  std::vector<double> degree(a.rows(), 0.0);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (double v : a.row_values(r)) degree[r] += v;
  }
  std::vector<std::uint64_t> row_ptr(a.row_ptr().begin(), a.row_ptr().end());
  std::vector<std::uint32_t> cols(a.col_idx().begin(), a.col_idx().end());
  std::vector<double> values(a.values().begin(), a.values().end());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::uint64_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) {
      // The product of degrees commutes, so the result stays exactly symmetric.
      const double dd = degree[r] * degree[cols[p]];
      values[p] = dd > 0.0 ? values[p] / std::sqrt(dd) : 0.0;
    }
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(row_ptr), std::move(cols),
                      std::move(values));
}

GraphArtifacts build_graphs(const data::Dataset& dataset,
                            const GraphConfig& config) {
  config.validate(dataset.user_count(), dataset.item_count());
  const auto& text = dataset.features(data::Modality::kText);
  const auto& visual = dataset.features(data::Modality::kVisual);
  const ad::Tensor item_h =
      graph_embedding(text.to_tensor(), visual.to_tensor(), config.alpha_m);
  const ad::Tensor user_h =
      graph_embedding(maic::build_user_features(dataset, text),
                      maic::build_user_features(dataset, visual), config.alpha_m);
  const auto pop = data::compute_popularity(dataset);

  GraphArtifacts g;
  g.base = base_knn_graph(item_h, config);
  g.counterfactual = topk_counterfactual(item_h, pop, config);
  g.item_graph = fuse_item_graphs(g.base, g.counterfactual, config.eta);
  g.user_graph = user_knn_graph(user_h, config);
  g.adjacency = build_augmented_adjacency(g.user_graph,
                                          interaction_matrix(dataset),
                                          g.item_graph);
  g.normalized = normalize_adjacency(g.adjacency);
  return g;
}

}  // namespace mailrec::graph
