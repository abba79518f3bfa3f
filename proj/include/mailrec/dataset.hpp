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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mailrec/features.hpp"
#include "mailrec/interactions.hpp"

namespace mailrec::data {

enum class Split : std::uint8_t { kTrain = 0, kValid = 1, kTest = 2 };

const char* to_string(Split s);
Split parse_split(const std::string& s);

struct SplitRatios {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;
};

// Interactions plus a split label per edge, training popularity counts and
// optional modality features. Immutable once built apart from attaching
// features.
class Dataset {
 public:
  Dataset() = default;
  Dataset(InteractionTable table, std::vector<Split> split);

  const InteractionTable& interactions() const { return table_; }
  std::size_t user_count() const { return table_.user_count; }
  std::size_t item_count() const { return table_.item_count; }
  std::size_t node_count() const { return user_count() + item_count(); }
  const std::vector<Split>& split() const { return split_; }

  // Sorted item indices of one user within one split.
  std::span<const std::size_t> items_of(std::size_t user, Split s) const;
  std::vector<Edge> edges(Split s) const;
  std::size_t edge_count(Split s) const;

  // n_j: training edges incident to item j.
  const std::vector<std::size_t>& item_pop() const { return item_pop_; }

  void set_features(FeatureMatrix features);
  const std::optional<FeatureMatrix>& text() const { return text_; }
  const std::optional<FeatureMatrix>& visual() const { return visual_; }
  const FeatureMatrix& features(Modality m) const;

 private:
  InteractionTable table_;
  std::vector<Split> split_;
  std::vector<std::size_t> item_pop_;
  // by_split_[s][u] lists the items of user u in split s.
  std::vector<std::vector<std::vector<std::size_t>>> by_split_;
  std::optional<FeatureMatrix> text_;
  std::optional<FeatureMatrix> visual_;
};

// Per-user shuffle with one seeded generator walked over users in index
// order. valid/test receive floor(n * ratio) edges each, raised to one when
// that floor is zero; the rest is training. Requires >= 3 edges per user.
Dataset split_dataset(const InteractionTable& table, const SplitRatios& ratios,
                      std::uint64_t seed);

// pop(j) = ln(1 + n_j) over training edges.
double popularity(std::size_t interactions);
std::vector<double> compute_popularity(const Dataset& dataset);

}  // namespace mailrec::data
