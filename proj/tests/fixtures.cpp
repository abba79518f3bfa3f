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

#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include <unistd.h>

#include "mailrec/features.hpp"
#include "mailrec/interactions.hpp"

namespace mailrec::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          (tag + "_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

ad::Tensor random_tensor(std::size_t rows, std::size_t cols, std::uint64_t seed,
                         double scale, bool requires_grad) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, scale);
  std::vector<double> v(rows * cols);
  for (double& x : v) x = g(rng);
  return ad::Tensor({rows, cols}, std::move(v), requires_grad);
}

ad::Tensor random_unit_rows(std::size_t rows, std::size_t cols,
                            std::uint64_t seed) {
  ad::Tensor t = random_tensor(rows, cols, seed);
  auto v = t.mutable_values();
  for (std::size_t r = 0; r < rows; ++r) {
    double sq = 0.0;
    for (std::size_t k = 0; k < cols; ++k) sq += v[r * cols + k] * v[r * cols + k];
    for (std::size_t k = 0; k < cols; ++k) v[r * cols + k] /= std::sqrt(sq);
  }
  return t;
}

std::vector<std::size_t> zipf_counts(std::size_t items, double exponent,
                                     std::uint64_t seed) {
  std::vector<std::size_t> rank(items);
  std::iota(rank.begin(), rank.end(), 1);
  std::mt19937_64 rng(seed);
  std::shuffle(rank.begin(), rank.end(), rng);
  std::vector<std::size_t> counts(items);
  for (std::size_t j = 0; j < items; ++j) {
    counts[j] = static_cast<std::size_t>(
        std::ceil(1000.0 * std::pow(static_cast<double>(rank[j]), -exponent)));
  }
  return counts;
}

std::size_t planted_block(std::size_t item, const PlantedSpec& spec) {
  return item / (spec.items / spec.blocks);
}

namespace {

data::FeatureMatrix block_features(const PlantedSpec& spec, std::size_t dim,
                                   data::Modality m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, spec.noise);
  data::FeatureMatrix f;
  f.modality = m;
  f.rows = spec.items;
  f.dim = dim;
  f.values.assign(spec.items * dim, 0.0);
  for (std::size_t i = 0; i < spec.items; ++i) {
    for (std::size_t k = 0; k < dim; ++k) f.values[i * dim + k] = g(rng);
    f.values[i * dim + planted_block(i, spec)] += 1.0;
  }
  return f;
}

data::FeatureMatrix gaussian_features(std::size_t rows, std::size_t dim,
                                      data::Modality m, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  data::FeatureMatrix f;
  f.modality = m;
  f.rows = rows;
  f.dim = dim;
  f.values.resize(rows * dim);
  for (double& v : f.values) v = g(rng);
  return f;
}

}  // namespace

data::Dataset planted_dataset(std::uint64_t seed, const PlantedSpec& spec) {
  std::mt19937_64 rng(seed);
  const std::size_t block_size = spec.items / spec.blocks;
  std::vector<data::Edge> edges;
  for (std::size_t u = 0; u < spec.users; ++u) {
    const std::size_t b = u % spec.blocks;
    std::vector<std::size_t> items(block_size);
    std::iota(items.begin(), items.end(), b * block_size);
    std::shuffle(items.begin(), items.end(), rng);
    for (std::size_t k = 0; k < spec.per_user; ++k) edges.push_back({u, items[k]});
  }
  auto table = data::make_table(spec.users, spec.items, std::move(edges));
  for (std::size_t u = 0; u < spec.users; ++u) table.user_ids.push_back("u" + std::to_string(u));
  for (std::size_t i = 0; i < spec.items; ++i) table.item_ids.push_back("i" + std::to_string(i));
  auto ds = data::split_dataset(table, {}, seed);
  ds.set_features(block_features(spec, spec.text_dim, data::Modality::kText, rng));
  ds.set_features(block_features(spec, spec.visual_dim, data::Modality::kVisual, rng));
  return ds;
}

data::Dataset random_dataset(std::size_t users, std::size_t items,
                             std::size_t min_per_user, std::uint64_t seed,
                             std::size_t text_dim, std::size_t visual_dim) {
  std::mt19937_64 rng(seed);
  std::vector<data::Edge> edges;
  std::vector<std::size_t> all(items);
  std::iota(all.begin(), all.end(), 0);
  std::uniform_int_distribution<std::size_t> extra(0, 2);
  for (std::size_t u = 0; u < users; ++u) {
    std::shuffle(all.begin(), all.end(), rng);
    const std::size_t n = std::min(items - 1, min_per_user + extra(rng));
    for (std::size_t k = 0; k < n; ++k) edges.push_back({u, all[k]});
  }
  // Every item gets at least one interaction.
  for (std::size_t i = 0; i < items; ++i) edges.push_back({i % users, i});
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  auto table = data::make_table(users, items, std::move(edges));
  for (std::size_t u = 0; u < users; ++u) table.user_ids.push_back("u" + std::to_string(u));
  for (std::size_t i = 0; i < items; ++i) table.item_ids.push_back("i" + std::to_string(i));
  auto ds = data::split_dataset(table, {}, seed);
  ds.set_features(gaussian_features(items, text_dim, data::Modality::kText, rng));
  ds.set_features(gaussian_features(items, visual_dim, data::Modality::kVisual, rng));
  return ds;
}

void write_raw_inputs(const data::Dataset& dataset, const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream out(dir / "interactions.tsv");
  const auto& t = dataset.interactions();
  for (const auto& e : t.edges) {
    out << t.user_ids[e.user] << '\t' << t.item_ids[e.item] << "\t5\n";
  }
  out.close();
  // Feature rows follow the first appearance order of items in the file.
  std::vector<std::size_t> order;
  std::vector<bool> seen(t.item_count, false);
  for (const auto& e : t.edges) {
    if (!seen[e.item]) {
      seen[e.item] = true;
      order.push_back(e.item);
    }
  }
  data::save_features(data::select_rows(dataset.features(data::Modality::kText), order),
                      dir / "text.mmf");
  data::save_features(data::select_rows(dataset.features(data::Modality::kVisual), order),
                      dir / "visual.mmf");
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace mailrec::testing
