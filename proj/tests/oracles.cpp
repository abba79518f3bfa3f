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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "mailrec/dataset.hpp"
#include "mailrec/graph.hpp"
#include "mailrec/metrics.hpp"
#include "mailrec/model.hpp"

namespace mailrec::testing {

std::vector<NeighborRow> knn_oracle(const ad::Tensor& h, std::size_t k,
                                    std::span<const double> pop,
                                    double lambda_cf, double eps) {
  const std::size_t n = h.rows();
  const std::size_t d = h.cols();
  std::vector<double> norm(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t c = 0; c < d; ++c) s += h(i, c) * h(i, c);
    norm[i] = std::sqrt(s);
  }
  std::vector<NeighborRow> out(n);
  std::vector<double> sim(n);
  std::vector<double> score(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < d; ++c) dot += h(i, c) * h(j, c);
      sim[j] = dot / (norm[i] * norm[j] + 1e-12);
      score[j] = pop.empty() ? sim[j] : sim[j] / std::pow(pop[j] + eps, lambda_cf);
    }
    std::vector<std::uint32_t> idx;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) idx.push_back(static_cast<std::uint32_t>(j));
    }
    std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
      if (score[a] != score[b]) return score[a] > score[b];
      return a < b;
    });
    idx.resize(std::min(k, idx.size()));
    for (std::uint32_t j : idx) {
      out[i].order.push_back(j);
      out[i].weights.push_back(sim[j]);
    }
  }
  return out;
}

bool matches_oracle(const SparseMatrix& g, const std::vector<NeighborRow>& rows) {
  if (g.rows() != rows.size()) return false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::pair<std::uint32_t, double>> want;
    for (std::size_t t = 0; t < rows[i].order.size(); ++t) {
      want.emplace_back(rows[i].order[t], rows[i].weights[t]);
    }
    std::sort(want.begin(), want.end());
    const auto cols = g.row_cols(i);
    const auto vals = g.row_values(i);
    if (cols.size() != want.size()) return false;
    for (std::size_t t = 0; t < want.size(); ++t) {
      if (cols[t] != want[t].first || vals[t] != want[t].second) return false;
    }
  }
  return true;
}

std::vector<std::vector<std::uint32_t>> neighbor_sets(const SparseMatrix& g) {
  std::vector<std::vector<std::uint32_t>> out(g.rows());
  for (std::size_t i = 0; i < g.rows(); ++i) {
    const auto cols = g.row_cols(i);
    out[i].assign(cols.begin(), cols.end());
  }
  return out;
}

double power_iteration_radius(const SparseMatrix& a, std::size_t iterations,
                              std::uint64_t seed) {
  const std::size_t n = a.rows();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  std::vector<double> x(n);
  for (double& v : x) v = u(rng);
  double estimate = 0.0;
  std::vector<double> y(n);
  for (std::size_t it = 0; it < iterations; ++it) {
    double xn = 0.0;
    for (double v : x) xn += v * v;
    xn = std::sqrt(xn);
    if (xn == 0.0) return 0.0;
    for (double& v : x) v /= xn;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      const auto cols = a.row_cols(i);
      const auto vals = a.row_values(i);
      for (std::size_t t = 0; t < cols.size(); ++t) s += vals[t] * x[cols[t]];
      y[i] = s;
    }
    double yn = 0.0;
    for (double v : y) yn += v * v;
    estimate = std::sqrt(yn);
    x.swap(y);
  }
  return estimate;
}

SparseMatrix random_symmetric_graph(std::size_t n, std::size_t degree,
                                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::uniform_real_distribution<double> w(0.05, 2.0);
  std::vector<Triplet> t;
  // The last node stays isolated.
  for (std::size_t e = 0; e < n * degree / 2; ++e) {
    const std::size_t i = pick(rng) % (n - 1);
    const std::size_t j = pick(rng) % (n - 1);
    if (i == j) continue;
    const double v = w(rng);
    t.push_back({i, j, v});
    t.push_back({j, i, v});
  }
  return SparseMatrix::from_triplets(n, n, t, DuplicatePolicy::kMax);
}

namespace {

std::vector<std::size_t> oracle_ranks(std::span<const double> scores,
                                      std::span<const std::size_t> exclude,
                                      std::span<const std::size_t> relevant) {
  auto excluded = [&](std::size_t j) {
    return std::find(exclude.begin(), exclude.end(), j) != exclude.end();
  };
  std::vector<std::size_t> ranks;
  for (std::size_t r : relevant) {
    std::size_t better = 0;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (j == r || excluded(j)) continue;
      if (scores[j] > scores[r] || (scores[j] == scores[r] && j < r)) ++better;
    }
    ranks.push_back(better);
  }
  return ranks;
}

}  // namespace

double recall_oracle(std::span<const double> scores,
                     std::span<const std::size_t> exclude,
                     std::span<const std::size_t> relevant, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t r : oracle_ranks(scores, exclude, relevant)) hits += r < k;
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double ndcg_oracle(std::span<const double> scores,
                   std::span<const std::size_t> exclude,
                   std::span<const std::size_t> relevant, std::size_t k) {
  auto ranks = oracle_ranks(scores, exclude, relevant);
  std::sort(ranks.begin(), ranks.end());
  double dcg = 0.0;
  for (std::size_t r : ranks) {
    if (r < k) dcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  }
  double idcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, relevant.size()); ++r) {
    idcg += 1.0 / std::log2(static_cast<double>(r) + 2.0);
  }
  return dcg / idcg;
}

DebiasOutcome debias_trial(std::uint64_t seed, std::size_t items,
                           double lambda_cf, std::size_t k) {
  const auto counts = zipf_counts(items, 1.2, seed);
  std::vector<double> pop(items);
  for (std::size_t j = 0; j < items; ++j) pop[j] = data::popularity(counts[j]);
  const ad::Tensor h = random_unit_rows(items, 16, seed + 1000003);
  graph::GraphConfig cfg;
  cfg.k_base = k;
  cfg.k_cf = k;
  cfg.lambda_cf = lambda_cf;
  const auto base = graph::base_knn_graph(h, cfg);
  const auto cf = graph::topk_counterfactual(h, pop, cfg);
  const auto b = eval::graph_bias_stats(base, counts, 0.8);
  const auto c = eval::graph_bias_stats(cf, counts, 0.8);
  return {b.avg_pop, c.avg_pop, b.tail_ratio, c.tail_ratio};
}

LossInstance small_loss_instance(std::uint64_t seed) {
  LossInstance inst{random_dataset(5, 6, 3, seed), {}, {}};
  inst.pairs = inst.dataset.edges(data::Split::kTrain);
  inst.ranking.n_neg = 1;
  for (const auto& e : inst.pairs) {
    const auto pos = inst.dataset.items_of(e.user, data::Split::kTrain);
    std::size_t neg = 0;
    while (std::binary_search(pos.begin(), pos.end(), neg)) ++neg;
    inst.ranking.users.push_back(e.user);
    inst.ranking.positives.push_back(e.item);
    inst.ranking.negatives.push_back(neg);
  }
  return inst;
}

std::vector<std::pair<std::string, ad::GradCheckReport>> check_loss_gradients(
    std::uint64_t seed) {
  const LossInstance inst = small_loss_instance(seed);
  graph::GraphConfig gcfg;
  gcfg.k_base = gcfg.k_cf = 3;
  gcfg.k_user = 2;
  model::ModelConfig mcfg;
  mcfg.maic.dim = 8;
  mcfg.maic.alpha_p = 0.4;
  mcfg.maic.alpha_m = 0.6;
  mcfg.weights.n_neg = 1;
  mcfg.weights.lambda_m = 0.3;
  mcfg.weights.lambda_s = 0.2;
  model::MailModel m(inst.dataset, graph::build_graphs(inst.dataset, gcfg).normalized,
                     mcfg, seed);
  // Move biases away from zero so their gradients are exercised off the origin.
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  for (auto& p : m.named_params()) {
    if (p.tensor->rows() == 1) {
      for (double& v : p.tensor->mutable_values()) v = jitter(rng);
    }
  }
  using Pick = ad::Var model::LossParts::*;
  const std::vector<std::pair<std::string, Pick>> terms = {
      {"ranking", &model::LossParts::rec},
      {"modal_infonce", &model::LossParts::mm},
      {"alignment", &model::LossParts::alignment},
      {"discrimination", &model::LossParts::discrimination},
      {"sce", &model::LossParts::sce},
      {"total", &model::LossParts::total}};
  const auto params = m.named_params();
  std::vector<std::pair<std::string, ad::GradCheckReport>> out;
  for (const auto& [name, pick] : terms) {
    auto fn = [&, pick = pick](ad::Tape& tape) {
      auto parts = m.forward(tape, inst.pairs, inst.ranking, &inst.dataset);
      return parts.*pick;
    };
    out.emplace_back(name, ad::grad_check(fn, params, 1e-4, 1e-4));
  }
  return out;
}

}  // namespace mailrec::testing
