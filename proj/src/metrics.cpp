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

#include "mailrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mailrec/errors.hpp"
#include "mailrec/kernels.hpp"

namespace mailrec::eval {

namespace {

void check_relevant(std::span<const std::size_t> relevant) {
  if (relevant.empty()) throw EmptyDataError("metric needs relevant items");
}

constexpr std::size_t kUserBlock = 256;

}  // namespace

std::vector<std::size_t> rank_items(std::span<const double> scores,
                                    std::span<const std::size_t> exclude,
                                    std::size_t limit) {
  std::vector<std::size_t> order;
  order.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::binary_search(exclude.begin(), exclude.end(), i)) order.push_back(i);
  }
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  if (limit > 0 && limit < order.size()) {
    std::partial_sort(order.begin(), order.begin() + limit, order.end(), better);
    order.resize(limit);
  } else {
    std::sort(order.begin(), order.end(), better);
  }
  return order;
}

double recall_at_k(std::span<const std::size_t> ranked,
                   std::span<const std::size_t> relevant, std::size_t k) {
  check_relevant(relevant);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
    if (std::binary_search(relevant.begin(), relevant.end(), ranked[r])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double ndcg_at_k(std::span<const std::size_t> ranked,
                 std::span<const std::size_t> relevant, std::size_t k) {
  check_relevant(relevant);
  double dcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
    if (std::binary_search(relevant.begin(), relevant.end(), ranked[r])) {
      dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
    }
  }
  double idcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, relevant.size()); ++r) {
    idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  }
  return dcg / idcg;
}

std::vector<UserMetrics> evaluate_users(const ad::Tensor& embeddings,
                                        const data::Dataset& dataset,
                                        data::Split target,
                                        std::span<const std::size_t> ks,
                                        std::span<const std::size_t> users) {
  const std::size_t nu = dataset.user_count();
  const std::size_t ni = dataset.item_count();
  if (embeddings.rows() != nu + ni) {
    throw ShapeError("evaluate: embeddings have " +
                     std::to_string(embeddings.rows()) + " rows, expected " +
                     std::to_string(nu + ni));
  }
  if (ks.empty()) throw ConfigError("evaluate: no cutoffs given");
  const std::size_t kmax = *std::max_element(ks.begin(), ks.end());

  std::vector<std::size_t> todo;
  if (users.empty()) {
    for (std::size_t u = 0; u < nu; ++u) todo.push_back(u);
  } else {
    todo.assign(users.begin(), users.end());
  }
  todo.erase(std::remove_if(todo.begin(), todo.end(),
                            [&](std::size_t u) {
                              return dataset.items_of(u, target).empty();
                            }),
             todo.end());

  const std::size_t d = embeddings.cols();
  const kernels::ConstMatrixView items{embeddings.values().data() + nu * d, ni, d};
  std::vector<UserMetrics> out(todo.size());
  std::vector<double> user_rows;
  std::vector<double> scores;
  for (std::size_t begin = 0; begin < todo.size(); begin += kUserBlock) {
    const std::size_t end = std::min(todo.size(), begin + kUserBlock);
    const std::size_t rows = end - begin;
    user_rows.resize(rows * d);
    for (std::size_t r = 0; r < rows; ++r) {
      const auto src = embeddings.values().subspan(todo[begin + r] * d, d);
      std::copy(src.begin(), src.end(), user_rows.begin() + r * d);
    }
    scores.assign(rows * ni, 0.0);
    kernels::parallel::gemm({user_rows.data(), rows, d}, kernels::Trans::kNo,
                            items, kernels::Trans::kYes,
                            {scores.data(), rows, ni});
#pragma omp parallel for schedule(dynamic)
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t u = todo[begin + r];
      const auto exclude = target == data::Split::kTrain
                               ? std::span<const std::size_t>()
                               : dataset.items_of(u, data::Split::kTrain);
      const auto ranked = rank_items(
          std::span<const double>(scores).subspan(r * ni, ni), exclude, kmax);
      const auto relevant = dataset.items_of(u, target);
      UserMetrics& m = out[begin + r];
      m.user = u;
      for (std::size_t k : ks) {
        m.recall[k] = recall_at_k(ranked, relevant, k);
        m.ndcg[k] = ndcg_at_k(ranked, relevant, k);
      }
    }
  }
  return out;
}

MetricsReport evaluate(const ad::Tensor& embeddings,
                       const data::Dataset& dataset, data::Split target,
                       std::span<const std::size_t> ks) {
  if (dataset.edge_count(target) == 0) {
    throw EmptyDataError(std::string("evaluate: the ") + data::to_string(target) +
                         " split is empty");
  }
  const auto per_user = evaluate_users(embeddings, dataset, target, ks);
  MetricsReport report;
  report.split = data::to_string(target);
  report.users_evaluated = per_user.size();
  for (std::size_t k : ks) {
    double r = 0.0;
    double n = 0.0;
    for (const auto& m : per_user) {
      r += m.recall.at(k);
      n += m.ndcg.at(k);
    }
    const double count = static_cast<double>(per_user.size());
    report.recall[k] = r / count;
    report.ndcg[k] = n / count;
  }
  return report;
}

std::vector<std::vector<std::size_t>> sparsity_groups(
    const data::Dataset& dataset, std::span<const std::size_t> boundaries) {
  if (!std::is_sorted(boundaries.begin(), boundaries.end()) ||
      std::adjacent_find(boundaries.begin(), boundaries.end()) != boundaries.end()) {
    throw ConfigError("sparsity boundaries must be strictly ascending");
  }
  std::vector<std::vector<std::size_t>> groups(boundaries.size() + 1);
  for (std::size_t u = 0; u < dataset.user_count(); ++u) {
    const std::size_t c = dataset.items_of(u, data::Split::kTrain).size();
    const std::size_t b = static_cast<std::size_t>(
        std::upper_bound(boundaries.begin(), boundaries.end(), c) -
        boundaries.begin());
    groups[b].push_back(u);
  }
  return groups;
}

std::vector<GroupMetrics> evaluate_per_group(
    const ad::Tensor& embeddings, const data::Dataset& dataset,
    data::Split target, std::span<const std::size_t> boundaries) {
  const auto groups = sparsity_groups(dataset, boundaries);
  const std::size_t k20[] = {20};
  std::vector<GroupMetrics> out;
  for (std::size_t b = 0; b < groups.size(); ++b) {
    GroupMetrics g;
    g.lower = b == 0 ? 0 : boundaries[b - 1];
    if (b < boundaries.size()) g.upper = boundaries[b];
    g.users = groups[b].size();
    if (!groups[b].empty()) {
      const auto per_user =
          evaluate_users(embeddings, dataset, target, k20, groups[b]);
      g.evaluated = per_user.size();
      if (!per_user.empty()) {
        double r = 0.0;
        for (const auto& m : per_user) r += m.recall.at(20);
        g.recall_at_20 = r / static_cast<double>(per_user.size());
      }
    }
    out.push_back(g);
  }
  return out;
}

std::size_t tail_threshold(std::span<const std::size_t> counts,
                           double tail_quantile) {
  if (!(tail_quantile > 0.0 && tail_quantile < 1.0)) {
    throw ConfigError("tail_quantile must lie in (0, 1)");
  }
  if (counts.empty()) throw EmptyDataError("tail_threshold: no items");
  std::vector<std::size_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  auto idx = static_cast<std::size_t>(
      std::ceil(tail_quantile * static_cast<double>(sorted.size()) - 1e-9));
  idx = std::clamp<std::size_t>(idx, 1, sorted.size());
  return sorted[idx - 1];
}

BiasStats graph_bias_stats(const SparseMatrix& graph,
                           std::span<const std::size_t> item_counts,
                           double tail_quantile) {
  if (graph.nnz() == 0) throw ContractError("graph_bias_stats: empty graph");
  if (graph.cols() != item_counts.size()) {
    throw ShapeError("graph_bias_stats: popularity length mismatch");
  }
  BiasStats s;
  s.tail_threshold = tail_threshold(item_counts, tail_quantile);
  s.edges = graph.nnz();
  double pop = 0.0;
  std::size_t tail = 0;
  for (std::uint32_t j : graph.col_idx()) {
    pop += std::log1p(static_cast<double>(item_counts[j]));
    if (item_counts[j] <= s.tail_threshold) ++tail;
  }
  s.avg_pop = pop / static_cast<double>(s.edges);
  s.tail_ratio = static_cast<double>(tail) / static_cast<double>(s.edges);
  return s;
}

nlohmann::json to_json(const BiasStats& stats) {
  return {{"avg_pop", stats.avg_pop},
          {"tail_ratio", stats.tail_ratio},
          {"tail_threshold", stats.tail_threshold},
          {"edges", stats.edges}};
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j;
  j["split"] = split;
  j["users_evaluated"] = users_evaluated;
  for (const auto& [k, v] : recall) j["recall@" + std::to_string(k)] = v;
  for (const auto& [k, v] : ndcg) j["ndcg@" + std::to_string(k)] = v;
  if (!groups.empty()) {
    auto& arr = j["groups"] = nlohmann::json::array();
    for (const auto& g : groups) {
      nlohmann::json e{{"lower", g.lower}, {"users", g.users},
                       {"evaluated", g.evaluated}};
      if (g.upper) e["upper"] = *g.upper;
      if (g.recall_at_20) e["recall@20"] = *g.recall_at_20;
      arr.push_back(e);
    }
  }
  for (const auto& [name, stats] : graph_bias) {
    j["graph_bias"][name] = eval::to_json(stats);
  }
  for (const auto& [name, v] : semantic_alignment) {
    j["semantic_alignment"][name] = v;
  }
  return j;
}

}  // namespace mailrec::eval
