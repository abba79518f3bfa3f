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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "mailrec/errors.hpp"
#include "mailrec/metrics.hpp"
#include "oracles.hpp"

using namespace mailrec;
using namespace mailrec::eval;
using ad::Tensor;
using data::Split;

namespace {

using Idx = std::vector<std::size_t>;

// Dataset with explicit (user, item, split) triples.
data::Dataset explicit_dataset(std::size_t users, std::size_t items,
                               std::vector<std::tuple<std::size_t, std::size_t, Split>> rows) {
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::make_pair(std::get<0>(a), std::get<1>(a)) <
           std::make_pair(std::get<0>(b), std::get<1>(b));
  });
  std::vector<data::Edge> edges;
  std::vector<Split> split;
  for (const auto& [u, i, s] : rows) {
    edges.push_back({u, i});
    split.push_back(s);
  }
  return data::Dataset(data::make_table(users, items, edges), split);
}

std::vector<double> user_scores(const Tensor& emb, std::size_t nu, std::size_t ni,
                                std::size_t u) {
  std::vector<double> s(ni);
  for (std::size_t i = 0; i < ni; ++i) {
    double d = 0;
    for (std::size_t k = 0; k < emb.cols(); ++k) d += emb(u, k) * emb(nu + i, k);
    s[i] = d;
  }
  return s;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("rank_items examples") {
  const std::vector<double> s = {3, 1, 2};
  CHECK(rank_items(s, Idx{}) == Idx{0, 2, 1});
  CHECK(rank_items(s, Idx{0}) == Idx{2, 1});
  CHECK(rank_items(s, Idx{}, 2) == Idx{0, 2});
  const std::vector<double> tie = {1, 5, 1, 5};
  CHECK(rank_items(tie, Idx{}) == Idx{1, 3, 0, 2});
  CHECK(rank_items(tie, Idx{1, 2}) == Idx{3, 0});
}

TEST_CASE("recall and ndcg examples") {
  const Idx ranked = {4, 7, 1, 0, 9, 3, 2, 8, 6, 5, 10, 11};
  CHECK(recall_at_k(ranked, Idx{4, 7}, 10) == 1.0);
  CHECK(recall_at_k(ranked, Idx{10, 11}, 10) == 0.0);
  CHECK(recall_at_k(ranked, Idx{1, 11}, 10) == 0.5);
  CHECK(ndcg_at_k(ranked, Idx{4}, 10) == 1.0);
  CHECK(ndcg_at_k(ranked, Idx{7}, 10) == doctest::Approx(1.0 / std::log2(3.0)).epsilon(1e-15));
  CHECK(ndcg_at_k(ranked, Idx{7}, 10) == doctest::Approx(0.63093).epsilon(1e-5));
  CHECK(ndcg_at_k(ranked, Idx{11}, 10) == 0.0);
  CHECK(ndcg_at_k(ranked, Idx{4, 7}, 10) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(recall_at_k(ranked, Idx{}, 10), EmptyDataError);
  CHECK_THROWS_AS(ndcg_at_k(ranked, Idx{}, 10), EmptyDataError);
}

TEST_CASE("metrics match a brute-force reranker") {
  const auto ds = testing::random_dataset(20, 30, 6, 4);
  const Tensor emb = testing::random_tensor(50, 6, 5);
  const std::size_t ks[] = {5, 10, 20};
  const auto per_user = evaluate_users(emb, ds, Split::kTest, ks);
  CHECK(per_user.size() == 20);
  for (const auto& um : per_user) {
    const auto s = user_scores(emb, 20, 30, um.user);
    const auto train = ds.items_of(um.user, Split::kTrain);
    const auto test = ds.items_of(um.user, Split::kTest);
    for (std::size_t k : ks) {
      CHECK(um.recall.at(k) == testing::recall_oracle(s, train, test, k));
      CHECK(std::abs(um.ndcg.at(k) - testing::ndcg_oracle(s, train, test, k)) <= 1e-15);
      CHECK(um.recall.at(k) >= 0.0);
      CHECK(um.ndcg.at(k) <= 1.0 + 1e-15);
    }
    for (std::size_t i : rank_items(s, train)) {
      CHECK_FALSE(std::binary_search(train.begin(), train.end(), i));
    }
  }
  const auto report = evaluate(emb, ds, Split::kTest, ks);
  double mean = 0.0;
  for (const auto& um : per_user) mean += um.recall.at(10);
  CHECK(std::abs(report.recall.at(10) - mean / 20.0) <= 1e-15);
  CHECK(report.users_evaluated == 20);
}

TEST_CASE("training split evaluation excludes nothing") {
  const auto ds = testing::random_dataset(6, 10, 4, 8);
  const Tensor emb = testing::random_tensor(16, 4, 9);
  const std::size_t ks[] = {10};
  for (const auto& um : evaluate_users(emb, ds, Split::kTrain, ks)) {
    CHECK(um.recall.at(10) == 1.0);  // every item is in the top 10 of 10
  }
}

TEST_CASE("users without targets are skipped") {
  const auto ds = explicit_dataset(
      2, 4, {{0, 0, Split::kTrain}, {0, 1, Split::kTest}, {1, 2, Split::kTrain},
             {1, 3, Split::kValid}});
  const Tensor emb = testing::random_tensor(6, 3, 1);
  const std::size_t ks[] = {1};
  const auto per = evaluate_users(emb, ds, Split::kTest, ks);
  REQUIRE(per.size() == 1);
  CHECK(per[0].user == 0);
  CHECK(evaluate(emb, ds, Split::kTest, ks).users_evaluated == 1);
  const auto empty = explicit_dataset(1, 2, {{0, 0, Split::kTrain}, {0, 1, Split::kValid}});
  CHECK_THROWS_AS(evaluate(testing::random_tensor(3, 2, 1), empty, Split::kTest, ks),
                  EmptyDataError);
}

TEST_CASE("planted block embeddings reach perfect recall") {
  const testing::PlantedSpec spec;
  const auto ds = testing::planted_dataset(3, spec);
  std::vector<double> v((spec.users + spec.items) * spec.blocks, 0.0);
  for (std::size_t u = 0; u < spec.users; ++u) {
    const auto items = ds.items_of(u, Split::kTrain);
    v[u * spec.blocks + testing::planted_block(items[0], spec)] = 1.0;
  }
  for (std::size_t i = 0; i < spec.items; ++i) {
    v[(spec.users + i) * spec.blocks + testing::planted_block(i, spec)] = 1.0;
  }
  const Tensor emb({spec.users + spec.items, spec.blocks}, v);
  const std::size_t ks[] = {10};
  CHECK(evaluate(emb, ds, Split::kTest, ks).recall.at(10) == 1.0);
  CHECK(evaluate(emb, ds, Split::kTrain, ks).recall.at(10) == 1.0);
}

TEST_CASE("random rankings hit at the uniform rate") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  const std::size_t n = 50, k = 10, trials = 4000;
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::vector<double> s(n);
    for (double& x : s) x = g(rng);
    const Idx relevant = {static_cast<std::size_t>(rng() % n)};
    hits += static_cast<std::size_t>(recall_at_k(rank_items(s, Idx{}), relevant, k));
  }
  const double p = static_cast<double>(k) / n;
  const double sigma = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(static_cast<double>(hits) / trials - p) <= 3 * sigma);
}

TEST_CASE("evaluation is invariant to item relabeling") {
  const auto ds = testing::random_dataset(12, 20, 5, 21);
  const Tensor emb = testing::random_tensor(32, 5, 22);
  std::vector<std::size_t> perm(20);
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(3);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::tuple<std::size_t, std::size_t, Split>> rows;
  const auto& edges = ds.interactions().edges;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    rows.emplace_back(edges[e].user, perm[edges[e].item], ds.split()[e]);
  }
  const auto relabeled = explicit_dataset(12, 20, rows);
  std::vector<double> v(emb.values().begin(), emb.values().end());
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t c = 0; c < 5; ++c) v[(12 + perm[i]) * 5 + c] = emb(12 + i, c);
  }
  const std::size_t ks[] = {3, 10};
  const auto a = evaluate(emb, ds, Split::kTest, ks);
  const auto b = evaluate(Tensor(emb.shape(), v), relabeled, Split::kTest, ks);
  CHECK(a.recall == b.recall);
  CHECK(a.ndcg == b.ndcg);
}

TEST_CASE("sparsity groups") {
  std::vector<std::tuple<std::size_t, std::size_t, Split>> rows;
  // user 0: 3 training edges, user 1: 7, user 2: 12.
  const std::size_t counts[] = {3, 7, 12};
  for (std::size_t u = 0; u < 3; ++u) {
    for (std::size_t i = 0; i < counts[u]; ++i) rows.emplace_back(u, i, Split::kTrain);
    rows.emplace_back(u, 19, Split::kTest);
  }
  const auto ds = explicit_dataset(3, 20, rows);
  const std::size_t bounds[] = {5, 10};
  const auto g = sparsity_groups(ds, bounds);
  REQUIRE(g.size() == 3);
  CHECK(g[0] == Idx{0});
  CHECK(g[1] == Idx{1});
  CHECK(g[2] == Idx{2});
  const std::size_t bad[] = {10, 5};
  CHECK_THROWS_AS(sparsity_groups(ds, bad), ConfigError);

  const Tensor emb = testing::random_tensor(23, 4, 3);
  const std::size_t wide[] = {100};
  const auto one = evaluate_per_group(emb, ds, Split::kTest, wide);
  const std::size_t ks[] = {20};
  REQUIRE(one.size() == 2);
  CHECK(one[0].users == 3);
  CHECK(*one[0].recall_at_20 == evaluate(emb, ds, Split::kTest, ks).recall.at(20));
  CHECK_FALSE(one[1].recall_at_20.has_value());
  CHECK(one[1].users == 0);

  const auto big = testing::random_dataset(30, 25, 3, 5);
  const std::size_t b4[] = {5, 10, 15, 20};
  std::size_t total = 0;
  for (const auto& grp : sparsity_groups(big, b4)) total += grp.size();
  CHECK(total == 30);
}

TEST_CASE("graph bias statistics") {
  const std::vector<std::size_t> counts = {9, 0, 0, 4, 1};
  const auto single = SparseMatrix::from_triplets(5, 5, {{1, 0, 0.3}});
  const auto s = graph_bias_stats(single, counts, 0.8);
  CHECK(s.avg_pop == doctest::Approx(std::log(10.0)).epsilon(1e-15));
  CHECK(s.avg_pop == doctest::Approx(2.302585).epsilon(1e-6));
  CHECK(s.tail_ratio == 0.0);
  CHECK(s.edges == 1);
  const auto cold = SparseMatrix::from_triplets(5, 5, {{0, 1, 0.3}, {3, 2, 0.1}});
  const auto c = graph_bias_stats(cold, counts, 0.8);
  CHECK(c.avg_pop == 0.0);
  CHECK(c.tail_ratio == 1.0);
  // Sorted counts 0 0 1 4 9: the bottom 80% ends at index 3.
  CHECK(tail_threshold(counts, 0.8) == 4);
  CHECK(tail_threshold(counts, 0.2) == 0);
  CHECK_THROWS_AS(graph_bias_stats(SparseMatrix(5, 5), counts, 0.8), ContractError);
  const auto j = to_json(s);
  CHECK(j.contains("avg_pop"));
  CHECK(j.contains("tail_ratio"));
}

TEST_CASE("report json keys") {
  const auto ds = testing::random_dataset(6, 10, 4, 2);
  const std::size_t ks[] = {10, 20};
  const auto r = evaluate(testing::random_tensor(16, 3, 1), ds, Split::kTest, ks);
  const auto j = r.to_json();
  CHECK(j.at("recall@10").get<double>() == r.recall.at(10));
  CHECK(j.contains("ndcg@20"));
  CHECK(j.at("split") == "test");
}

}  // TEST_SUITE
