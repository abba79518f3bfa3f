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

#include "mailrec/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mailrec/errors.hpp"

namespace mailrec::data {

const char* to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValid: return "valid";
    case Split::kTest: return "test";
  }
  return "?";
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "valid") return Split::kValid;
  if (s == "test") return Split::kTest;
  throw FormatError("unknown split label '" + s + "'");
}

Dataset::Dataset(InteractionTable table, std::vector<Split> split)
    : table_(std::move(table)), split_(std::move(split)) {
  table_.validate();
  if (split_.size() != table_.edges.size()) {
    throw ContractError("split labels must cover every edge");
  }
  item_pop_.assign(table_.item_count, 0);
  by_split_.assign(3, std::vector<std::vector<std::size_t>>(table_.user_count));
  for (std::size_t e = 0; e < table_.edges.size(); ++e) {
    const Edge& edge = table_.edges[e];
    const auto s = static_cast<std::size_t>(split_[e]);
    // Edges are sorted by (user, item), so each list stays sorted.
    by_split_[s][edge.user].push_back(edge.item);
    if (split_[e] == Split::kTrain) ++item_pop_[edge.item];
  }
}

std::span<const std::size_t> Dataset::items_of(std::size_t user, Split s) const {
  return by_split_[static_cast<std::size_t>(s)][user];
}

std::vector<Edge> Dataset::edges(Split s) const {
  std::vector<Edge> out;
  for (std::size_t e = 0; e < split_.size(); ++e) {
    if (split_[e] == s) out.push_back(table_.edges[e]);
  }
  return out;
}

std::size_t Dataset::edge_count(Split s) const {
  return static_cast<std::size_t>(std::count(split_.begin(), split_.end(), s));
}

void Dataset::set_features(FeatureMatrix features) {
  if (features.rows != item_count()) {
    throw ShapeError(to_string(features.modality) + " features have " +
                     std::to_string(features.rows) + " rows for " +
                     std::to_string(item_count()) + " items");
  }
  for (double v : features.values) {
    if (!std::isfinite(v)) throw NumericsError("non-finite feature value");
  }
  (features.modality == Modality::kText ? text_ : visual_) = std::move(features);
}

const FeatureMatrix& Dataset::features(Modality m) const {
  const auto& f = m == Modality::kText ? text_ : visual_;
  if (!f) throw ContractError("dataset has no " + to_string(m) + " features");
  return *f;
}

Dataset split_dataset(const InteractionTable& table, const SplitRatios& ratios,
                      std::uint64_t seed) {
  if (ratios.train < 0 || ratios.valid < 0 || ratios.test < 0 ||
      std::abs(ratios.train + ratios.valid + ratios.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be non-negative and sum to 1");
  }
  table.validate();
  std::vector<std::vector<std::size_t>> user_edges(table.user_count);
  for (std::size_t e = 0; e < table.edges.size(); ++e) {
    user_edges[table.edges[e].user].push_back(e);
  }

  std::mt19937_64 rng(seed);
  std::vector<Split> split(table.edges.size(), Split::kTrain);
  for (std::size_t u = 0; u < table.user_count; ++u) {
    auto& mine = user_edges[u];
    const std::size_t n = mine.size();
    if (n < 3) {
      throw SplitError("user " + table.user_name(u) + " has " +
                       std::to_string(n) + " interactions; at least 3 needed");
    }
    // The small epsilon keeps exact products such as 10 * 0.1 from
    // flooring one below.
    auto quota = [n](double r) {
      const auto q = static_cast<std::size_t>(std::floor(static_cast<double>(n) * r + 1e-9));
      return std::max<std::size_t>(q, 1);
    };
    const std::size_t n_valid = quota(ratios.valid);
    const std::size_t n_test = quota(ratios.test);
    if (n_valid + n_test >= n) {
      throw SplitError("user " + table.user_name(u) +
                       " cannot keep a training interaction");
    }
    std::shuffle(mine.begin(), mine.end(), rng);
    for (std::size_t k = 0; k < n_test; ++k) split[mine[k]] = Split::kTest;
    for (std::size_t k = n_test; k < n_test + n_valid; ++k) {
      split[mine[k]] = Split::kValid;
    }
  }
  return Dataset(table, std::move(split));
}

double popularity(std::size_t interactions) {
  return std::log1p(static_cast<double>(interactions));
}

std::vector<double> compute_popularity(const Dataset& dataset) {
  std::vector<double> pop;
  pop.reserve(dataset.item_count());
  for (std::size_t n : dataset.item_pop()) pop.push_back(popularity(n));
  return pop;
}

}  // namespace mailrec::data
